#include "vtpseg/runner.hpp"

#include "vtpseg/clip_filter.hpp"
#include "vtpseg/errors.hpp"
#include "vtpseg/http_backends.hpp"
#include "vtpseg/image_io.hpp"
#include "vtpseg/mock_backends.hpp"
#include "vtpseg/rng.hpp"
#include "vtpseg/scene.hpp"
#include "vtpseg/segmentation.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>

namespace fs = std::filesystem;

namespace vtpseg {

namespace {

bool is_image_ext(std::string ext) {
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".png" || ext == ".tif" || ext == ".tiff";
}

std::vector<std::pair<std::string, fs::path>> list_images(const std::string& dir) {
    if (!fs::is_directory(dir)) throw ConfigError("image directory not found: " + dir);
    std::vector<std::pair<std::string, fs::path>> images;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (!is_image_ext(entry.path().extension().string())) continue;
        images.emplace_back(entry.path().stem().string(), entry.path());
    }
    std::sort(images.begin(), images.end());
    if (images.empty()) throw ConfigError("image directory contains no readable images: " + dir);
    for (std::size_t i = 1; i < images.size(); ++i) {
        if (images[i].first == images[i - 1].first) {
            throw ConfigError("duplicate image stem '" + images[i].first +
                              "'; output masks would collide");
        }
    }
    return images;
}

std::set<std::string> png_stems(const std::string& dir) {
    if (!fs::is_directory(dir)) throw EvalError("directory not found: " + dir);
    std::set<std::string> stems;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".png") {
            stems.insert(entry.path().stem().string());
        }
    }
    return stems;
}

PromptSet load_prompts_for(const RunConfig& cfg) {
    PromptSet ps = load_prompt_file(cfg.prompt_file);
    if (!cfg.template_override) return ps;
    return PromptSet(ps.classes(), ps.unrelated(), *cfg.template_override);
}

DetectionRecord make_detection_record(const Detection& det) {
    DetectionRecord rec;
    rec.bbox = det.bbox;
    rec.raw_label = det.raw_label;
    rec.canonical_class = det.canonical_class;
    rec.confidence = det.confidence;
    rec.source_scale = det.source_scale;
    return rec;
}

}  // namespace

void RunConfig::validate() const {
    if (prompt_file.empty()) throw ConfigError("config: prompt file not set");
    if (!fs::is_regular_file(prompt_file)) {
        throw ConfigError("config: prompt file not found: " + prompt_file);
    }
    try {
        gd.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (filter_enabled) {
        if (magnifications.empty()) {
            throw ConfigError("config: magnifications must not be empty when the filter is on");
        }
        for (double m : magnifications) {
            if (!(m >= 1.0)) throw ConfigError("config: magnifications must be >= 1");
        }
    }
    if (backend == "mock") {
        if (mock.scene_file.empty() || !fs::is_regular_file(mock.scene_file)) {
            throw ConfigError("config: mock backend needs an existing scene_file");
        }
        if (mock.detector_duplicates < 1) throw ConfigError("config: detector_duplicates >= 1");
        if (mock.detector_jitter_px < 0.0) throw ConfigError("config: detector_jitter_px >= 0");
        if (mock.scorer_epsilon < 0.0 || mock.scorer_epsilon >= 1.0) {
            throw ConfigError("config: scorer_epsilon must be in [0, 1)");
        }
    } else if (backend == "http") {
        if (http.detector_url.empty() || http.scorer_url.empty() || http.segmenter_url.empty()) {
            throw ConfigError("config: http backend needs detector/scorer/segmenter urls");
        }
    } else {
        throw ConfigError("config: backend must be 'mock' or 'http'");
    }
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not readable: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }

    const fs::path base = fs::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        return fs::path(p).is_absolute() ? p : (base / p).string();
    };

    RunConfig cfg;
    try {
        cfg.prompt_file = resolve(j.at("prompts").get<std::string>());
        if (j.contains("scales")) cfg.gd.scales = j.at("scales").get<std::vector<double>>();
        cfg.gd.nms_overlap_threshold = j.value("nms_overlap_threshold", 0.1);
        cfg.gd.max_area_fraction = j.value("max_area_fraction", 0.9);
        cfg.gd.min_confidence = j.value("min_confidence", 0.0);
        if (j.contains("magnifications")) {
            cfg.magnifications = j.at("magnifications").get<std::vector<double>>();
        }
        cfg.filter_enabled = j.value("filter_enabled", true);
        if (j.contains("template")) cfg.template_override = j.at("template").get<std::string>();
        cfg.seed = j.value("seed", std::uint64_t{0});
        cfg.debug_patches = j.value("debug_patches", false);

        const auto& jb = j.at("backend");
        cfg.backend = jb.at("type").get<std::string>();
        if (cfg.backend == "mock") {
            cfg.mock.scene_file = resolve(jb.at("scene_file").get<std::string>());
            cfg.mock.detector_duplicates = jb.value("detector_duplicates", 1);
            cfg.mock.detector_jitter_px = jb.value("detector_jitter_px", 0.0);
            cfg.mock.scorer_epsilon = jb.value("scorer_epsilon", 0.0);
        } else if (cfg.backend == "http") {
            cfg.http.detector_url = jb.at("detector_url").get<std::string>();
            cfg.http.scorer_url = jb.at("scorer_url").get<std::string>();
            cfg.http.segmenter_url = jb.at("segmenter_url").get<std::string>();
            cfg.http.timeout_sec = jb.value("timeout_sec", 120);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
    cfg.validate();
    return cfg;
}

RunResult run(const RunConfig& cfg, const std::string& images_dir, const std::string& out_dir) {
    cfg.validate();
    const PromptSet ps = load_prompts_for(cfg);
    const auto images = list_images(images_dir);

    SceneMap scenes;
    if (cfg.backend == "mock") scenes = load_scene_file(cfg.mock.scene_file);

    std::unique_ptr<Detector> http_det;
    std::unique_ptr<ImageTextScorer> http_scorer;
    std::unique_ptr<PointSegmenter> http_seg;
    if (cfg.backend == "http") {
        http_det = std::make_unique<HttpDetector>(cfg.http.detector_url, cfg.http.timeout_sec);
        http_scorer = std::make_unique<HttpScorer>(cfg.http.scorer_url, cfg.http.timeout_sec);
        http_seg = std::make_unique<HttpSegmenter>(cfg.http.segmenter_url, cfg.http.timeout_sec);
    }

    fs::create_directories(out_dir);
    const fs::path debug_dir = fs::path(out_dir) / "debug_patches";
    if (cfg.debug_patches) fs::create_directories(debug_dir);

    RunResult result;
    for (const auto& [stem, path] : images) {
        ImageRecord rec;
        rec.image = stem;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            Image img = read_image(path.string());
            img.id = stem;
            rec.width = img.width();
            rec.height = img.height();

            std::unique_ptr<Detector> mock_det;
            std::unique_ptr<ImageTextScorer> mock_scorer;
            std::unique_ptr<PointSegmenter> mock_seg;
            Detector* det = http_det.get();
            ImageTextScorer* scorer = http_scorer.get();
            PointSegmenter* seg = http_seg.get();
            if (cfg.backend == "mock") {
                const auto it = scenes.find(stem);
                if (it == scenes.end()) {
                    throw ConfigError("no scene entry for image '" + stem + "'");
                }
                MockDetectorOptions dopts;
                dopts.duplicates = cfg.mock.detector_duplicates;
                dopts.jitter_px = cfg.mock.detector_jitter_px;
                dopts.seed = hash_combine(cfg.seed, fnv1a(stem));
                mock_det = std::make_unique<MockDetector>(it->second, dopts);
                mock_scorer = std::make_unique<MockScorer>(it->second, ps,
                                                           MockScorerOptions{cfg.mock.scorer_epsilon, -1});
                mock_seg = std::make_unique<MockSegmenter>(it->second);
                det = mock_det.get();
                scorer = mock_scorer.get();
                seg = mock_seg.get();
            }

            GdPlusTrace trace;
            const std::vector<Detection> dets = gd_plus(img, ps, *det, cfg.gd, &trace);
            rec.raw_per_scale = trace.raw_per_scale;
            rec.raw_count = trace.raw_total;
            rec.post_nms_count = static_cast<int>(dets.size());

            std::vector<Detection> kept;
            if (cfg.filter_enabled && !cfg.magnifications.empty()) {
                PatchSink sink;
                if (cfg.debug_patches) {
                    sink = [&](int det_index, double mag, const ExtendedPatch& patch) {
                        char name[128];
                        std::snprintf(name, sizeof name, "%s_det%03d_mag%g.png", stem.c_str(),
                                      det_index, mag);
                        write_image_png((debug_dir / name).string(), patch.pixels);
                    };
                }
                const std::vector<FilterRecord> decisions = filter_detections_detailed(
                    dets, img, ps, *scorer, cfg.magnifications, sink);
                for (const FilterRecord& fr : decisions) {
                    const Detection& det_i = dets[static_cast<std::size_t>(fr.detection_index)];
                    DetectionRecord dr = make_detection_record(det_i);
                    FilterOutcome outcome;
                    outcome.kept = fr.kept;
                    outcome.argmax = static_cast<int>(fr.result.argmax);
                    outcome.matched_class = fr.result.matched_class;
                    outcome.averaged_probabilities.assign(
                        fr.result.probabilities.data(),
                        fr.result.probabilities.data() + fr.result.probabilities.size());
                    dr.filter = std::move(outcome);
                    rec.detections.push_back(std::move(dr));
                    if (fr.kept) kept.push_back(det_i);
                }
            } else {
                kept = dets;
                for (const Detection& det_i : dets) {
                    rec.detections.push_back(make_detection_record(det_i));
                }
            }
            rec.post_filter_count = static_cast<int>(kept.size());

            const std::vector<InstanceMask> instances = segment_all(img, kept, *seg);
            for (const InstanceMask& inst : instances) {
                if (inst.is_empty) ++rec.empty_mask_count;
            }
            const LabelMask mask =
                assemble_label_mask(instances, img.height(), img.width(), ps.class_count());
            write_label_png((fs::path(out_dir) / (stem + ".png")).string(), mask.labels);
            ++result.images_ok;
        } catch (const std::exception& e) {
            rec.error = e.what();
            ++result.images_failed;
        }
        rec.elapsed_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
        result.records.push_back(std::move(rec));
    }

    write_manifest((fs::path(out_dir) / "manifest.jsonl").string(), result.records);
    return result;
}

EvalReport evaluate(const std::string& pred_dir, const std::string& gt_dir, const PromptSet& ps) {
    const std::set<std::string> pred = png_stems(pred_dir);
    const std::set<std::string> gt = png_stems(gt_dir);
    if (gt.empty()) throw EvalError("ground-truth directory has no label maps: " + gt_dir);

    std::string missing;
    for (const std::string& stem : gt) {
        if (!pred.count(stem)) missing += "\n  missing prediction for '" + stem + ".png'";
    }
    for (const std::string& stem : pred) {
        if (!gt.count(stem)) missing += "\n  missing ground truth for '" + stem + ".png'";
    }
    if (!missing.empty()) throw EvalError("prediction/ground-truth stems do not match:" + missing);

    ConfusionMatrix cm(ps.class_count());
    for (const std::string& stem : gt) {
        const std::string file = stem + ".png";
        const Plane<std::uint8_t> p = read_label_png((fs::path(pred_dir) / file).string());
        const Plane<std::uint8_t> g = read_label_png((fs::path(gt_dir) / file).string());
        if (p.rows() != g.rows() || p.cols() != g.cols()) {
            throw EvalError("dimension mismatch for '" + file + "': pred " +
                            std::to_string(p.cols()) + "x" + std::to_string(p.rows()) + " vs gt " +
                            std::to_string(g.cols()) + "x" + std::to_string(g.rows()));
        }
        try {
            cm.accumulate(LabelMask(p, ps.class_count()), LabelMask(g, ps.class_count()));
        } catch (const std::invalid_argument& e) {
            throw EvalError("bad label map '" + file + "': " + e.what());
        }
    }
    return compute_report(cm);
}

std::vector<AblationRow> ablate(const RunConfig& cfg, const std::string& images_dir,
                                const std::string& gt_dir, const std::string& out_dir) {
    cfg.validate();
    if (cfg.magnifications.empty()) {
        throw ConfigError("ablate: config must carry at least one magnification");
    }
    const PromptSet ps = load_prompts_for(cfg);

    RunConfig row_a = cfg;
    row_a.gd.scales = {1.0};
    row_a.gd.nms_overlap_threshold = 1.0;  // iou can never exceed 1: suppression off
    row_a.gd.max_area_fraction = 1.0;
    row_a.filter_enabled = false;

    RunConfig row_b = cfg;
    row_b.filter_enabled = false;

    RunConfig row_c = cfg;
    row_c.filter_enabled = true;
    row_c.magnifications = {cfg.magnifications.front()};

    RunConfig row_d = cfg;
    row_d.filter_enabled = true;

    const std::vector<std::pair<std::string, RunConfig>> plan = {
        {"detector+segmenter", row_a},
        {"+multi-scale+NMS", row_b},
        {"+prompt filter (single magnification)", row_c},
        {"full pipeline", row_d},
    };

    std::vector<AblationRow> rows;
    char sub[8];
    for (std::size_t i = 0; i < plan.size(); ++i) {
        std::snprintf(sub, sizeof sub, "row_%c", static_cast<char>('a' + i));
        const std::string row_dir = (fs::path(out_dir) / sub).string();
        AblationRow row;
        row.label = plan[i].first;
        row.config = plan[i].second;
        row.run = run(plan[i].second, images_dir, row_dir);
        row.report = evaluate(row_dir, gt_dir, ps);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_ablation_table(const std::vector<AblationRow>& rows) {
    auto cell = [](const std::optional<double>& v) {
        char buf[16];
        if (v) {
            std::snprintf(buf, sizeof buf, "%6.4f", *v);
        } else {
            std::snprintf(buf, sizeof buf, "   -  ");
        }
        return std::string(buf);
    };
    std::string out = "row  configuration                             MIoU      PA      PP      PR    Dice\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        char line[256];
        std::snprintf(line, sizeof line, "(%c)  %-40s %s  %s  %s  %s  %s\n",
                      static_cast<char>('a' + i), rows[i].label.c_str(),
                      cell(rows[i].report.miou).c_str(), cell(rows[i].report.pixel_accuracy).c_str(),
                      cell(rows[i].report.pixel_precision).c_str(),
                      cell(rows[i].report.pixel_recall).c_str(), cell(rows[i].report.dice).c_str());
        out += line;
    }
    return out;
}

SceneDescription generate_scene(const PromptSet& ps, const CorpusSpec& spec, int image_index) {
    if (spec.width < 64 || spec.height < 64) {
        throw ConfigError("corpus: image size must be at least 64x64");
    }
    if (spec.distractors_per_image > 0 && ps.unrelated().empty()) {
        throw ConfigError("corpus: distractors need at least one unrelated prompt");
    }
    RandomStream rs(hash_combine(spec.seed, static_cast<std::uint64_t>(image_index)));
    SceneDescription scene;
    scene.width = spec.width;
    scene.height = spec.height;

    const int margin = 12;
    const int gap = 10;
    const int max_side = std::min(56, std::min(spec.width, spec.height) / 4);
    const int min_side = std::min(24, max_side);

    auto place = [&]() -> std::optional<BBox> {
        for (int attempt = 0; attempt < 400; ++attempt) {
            const int w = rs.next_int(min_side, max_side);
            const int h = rs.next_int(min_side, max_side);
            const int x0 = rs.next_int(margin, spec.width - margin - w);
            const int y0 = rs.next_int(margin, spec.height - margin - h);
            const BBox cand(x0, y0, x0 + w, y0 + h);
            bool clear = true;
            for (const SceneShape& other : scene.shapes) {
                const BBox inflated(other.rect.x_min - gap, other.rect.y_min - gap,
                                    other.rect.x_max + gap, other.rect.y_max + gap);
                if (iou(cand, inflated) > 0.0) {
                    clear = false;
                    break;
                }
            }
            if (clear) return cand;
        }
        return std::nullopt;
    };

    for (int k = 0; k < spec.objects_per_image; ++k) {
        const auto rect = place();
        if (!rect) throw ConfigError("corpus: could not place all objects; reduce the count");
        SceneShape shape;
        shape.rect = *rect;
        shape.class_id = (k % ps.class_count()) + 1;
        shape.confidence = rs.next_uniform(0.70, 0.95);
        scene.shapes.push_back(shape);
    }
    for (int k = 0; k < spec.distractors_per_image; ++k) {
        const auto rect = place();
        if (!rect) throw ConfigError("corpus: could not place all distractors; reduce the count");
        SceneShape shape;
        shape.rect = *rect;
        shape.class_id = 0;
        shape.confidence = rs.next_uniform(0.75, 0.90);
        shape.distractor = true;
        shape.distractor_label =
            ps.unrelated()[static_cast<std::size_t>(rs.next_int(0, static_cast<int>(ps.unrelated().size()) - 1))];
        shape.reported_class_id = rs.next_int(1, ps.class_count());
        scene.shapes.push_back(shape);
    }
    return scene;
}

void generate_corpus(const PromptSet& ps, const CorpusSpec& spec, const std::string& out_dir) {
    if (spec.image_count < 1) throw ConfigError("corpus: image_count must be >= 1");
    const fs::path out(out_dir);
    fs::create_directories(out / "images");
    fs::create_directories(out / "gt");

    SceneMap scenes;
    for (int i = 0; i < spec.image_count; ++i) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "img_%03d", i);
        const SceneDescription scene = generate_scene(ps, spec, i);
        write_image_png((out / "images" / (std::string(stem) + ".png")).string(),
                        render_scene(scene, stem));
        write_label_png((out / "gt" / (std::string(stem) + ".png")).string(),
                        scene_ground_truth(scene, ps.class_count()).labels);
        scenes.emplace(stem, scene);
    }
    save_scene_file((out / "scenes.json").string(), scenes);
    save_prompt_file((out / "prompts.json").string(), ps);

    nlohmann::json cfg;
    cfg["prompts"] = "prompts.json";
    cfg["scales"] = {0.5, 1.0};
    cfg["nms_overlap_threshold"] = 0.1;
    cfg["max_area_fraction"] = 0.9;
    cfg["min_confidence"] = 0.0;
    cfg["magnifications"] = {1.2, 1.5};
    cfg["seed"] = spec.seed;
    cfg["backend"] = {{"type", "mock"},
                      {"scene_file", "scenes.json"},
                      {"detector_duplicates", 1},
                      {"detector_jitter_px", 0.0},
                      {"scorer_epsilon", 0.0}};
    std::ofstream cfg_out(out / "config.json");
    if (!cfg_out) throw IoError((out / "config.json").string(), "cannot open for writing");
    cfg_out << cfg.dump(2) << "\n";
}

}  // namespace vtpseg
