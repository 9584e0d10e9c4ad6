#include "vtpseg/errors.hpp"
#include "vtpseg/metrics.hpp"
#include "vtpseg/prompts.hpp"
#include "vtpseg/runner.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

nlohmann::json report_to_json(const vtpseg::EvalReport& r) {
    auto opt = [](const std::optional<double>& v) {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    nlohmann::json j;
    j["miou"] = opt(r.miou);
    j["pixel_accuracy"] = opt(r.pixel_accuracy);
    j["pixel_precision"] = opt(r.pixel_precision);
    j["pixel_recall"] = opt(r.pixel_recall);
    j["dice"] = opt(r.dice);
    j["image_count"] = r.image_count;
    j["total_pixels"] = r.total_pixels;
    j["per_class"] = nlohmann::json::array();
    for (const vtpseg::ClassMetrics& c : r.per_class) {
        j["per_class"].push_back({{"class_id", c.class_id},
                                  {"tp", c.tp},
                                  {"fp", c.fp},
                                  {"fn", c.fn},
                                  {"iou", opt(c.iou)},
                                  {"precision", opt(c.precision)},
                                  {"recall", opt(c.recall)},
                                  {"dice", opt(c.dice)}});
    }
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Open-vocabulary remote sensing segmentation pipeline"};
    app.require_subcommand(1);

    std::string config_path, images_dir, out_dir, pred_dir, gt_dir, classes_path, report_path;
    std::optional<std::uint64_t> seed_override;
    bool debug_patches = false;

    CLI::App* cmd_run = app.add_subcommand("run", "Segment every image in a directory");
    cmd_run->add_option("--config", config_path, "Run configuration (JSON)")->required();
    cmd_run->add_option("--images", images_dir, "Input image directory")->required();
    cmd_run->add_option("--out", out_dir, "Output directory (label PNGs + manifest.jsonl)")
        ->required();
    cmd_run->add_option("--seed", seed_override, "Override the config seed");
    cmd_run->add_flag("--debug-patches", debug_patches, "Dump annotated patches as PNGs");

    CLI::App* cmd_eval = app.add_subcommand("eval", "Score predictions against ground truth");
    cmd_eval->add_option("--pred", pred_dir, "Predicted label maps")->required();
    cmd_eval->add_option("--gt", gt_dir, "Ground-truth label maps")->required();
    cmd_eval->add_option("--classes", classes_path, "Prompt/class file (JSON)")->required();
    cmd_eval->add_option("--out", report_path, "Also write the report as JSON");

    CLI::App* cmd_ablate = app.add_subcommand("ablate", "Incremental component comparison");
    cmd_ablate->add_option("--config", config_path, "Run configuration (JSON)")->required();
    cmd_ablate->add_option("--images", images_dir, "Input image directory")->required();
    cmd_ablate->add_option("--gt", gt_dir, "Ground-truth label maps")->required();
    cmd_ablate->add_option("--out", out_dir, "Output directory (per-row runs + ablation.json)")
        ->required();
    cmd_ablate->add_option("--seed", seed_override, "Override the config seed");

    CLI::App* cmd_gen = app.add_subcommand("gen", "Generate a synthetic mock corpus");
    vtpseg::CorpusSpec corpus;
    cmd_gen->add_option("--classes", classes_path, "Prompt/class file (JSON)")->required();
    cmd_gen->add_option("--out", out_dir, "Corpus directory")->required();
    cmd_gen->add_option("--images", corpus.image_count, "Number of images");
    cmd_gen->add_option("--size", corpus.width, "Image side length (square)");
    cmd_gen->add_option("--objects", corpus.objects_per_image, "True objects per image");
    cmd_gen->add_option("--distractors", corpus.distractors_per_image, "Distractors per image");
    cmd_gen->add_option("--seed", corpus.seed, "Corpus seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (cmd_run->parsed()) {
            vtpseg::RunConfig cfg = vtpseg::load_run_config(config_path);
            if (seed_override) cfg.seed = *seed_override;
            if (debug_patches) cfg.debug_patches = true;
            const vtpseg::RunResult result = vtpseg::run(cfg, images_dir, out_dir);
            std::printf("processed %d image(s), %d failed; outputs in %s\n", result.images_ok,
                        result.images_failed, out_dir.c_str());
            return result.images_failed > 0 ? kExitPartial : kExitOk;
        }
        if (cmd_eval->parsed()) {
            const vtpseg::PromptSet ps = vtpseg::load_prompt_file(classes_path);
            const vtpseg::EvalReport report = vtpseg::evaluate(pred_dir, gt_dir, ps);
            std::printf("%s", vtpseg::format_report_table(report).c_str());
            if (!report_path.empty()) {
                std::ofstream out(report_path);
                if (!out) throw vtpseg::IoError(report_path, "cannot open for writing");
                out << report_to_json(report).dump(2) << "\n";
            }
            return kExitOk;
        }
        if (cmd_ablate->parsed()) {
            vtpseg::RunConfig cfg = vtpseg::load_run_config(config_path);
            if (seed_override) cfg.seed = *seed_override;
            const std::vector<vtpseg::AblationRow> rows =
                vtpseg::ablate(cfg, images_dir, gt_dir, out_dir);
            std::printf("%s", vtpseg::format_ablation_table(rows).c_str());
            nlohmann::json j = nlohmann::json::array();
            int failed = 0;
            for (const vtpseg::AblationRow& row : rows) {
                failed += row.run.images_failed;
                j.push_back({{"label", row.label}, {"report", report_to_json(row.report)}});
            }
            std::ofstream out(std::filesystem::path(out_dir) / "ablation.json");
            if (!out) throw vtpseg::IoError(out_dir + "/ablation.json", "cannot open for writing");
            out << j.dump(2) << "\n";
            return failed > 0 ? kExitPartial : kExitOk;
        }
        if (cmd_gen->parsed()) {
            corpus.height = corpus.width;
            const vtpseg::PromptSet ps = vtpseg::load_prompt_file(classes_path);
            vtpseg::generate_corpus(ps, corpus, out_dir);
            std::printf("wrote %d image(s) + scenes + config under %s\n", corpus.image_count,
                        out_dir.c_str());
            return kExitOk;
        }
    } catch (const vtpseg::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const vtpseg::EvalError& e) {
        std::fprintf(stderr, "evaluation failed: %s\n", e.what());
        return kExitPartial;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitPartial;
    }
    return kExitConfig;
}
