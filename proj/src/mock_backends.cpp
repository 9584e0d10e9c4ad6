#include "vtpseg/mock_backends.hpp"

#include "vtpseg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vtpseg {

MockDetector::MockDetector(SceneDescription scene, MockDetectorOptions opts)
    : scene_(std::move(scene)), opts_(opts) {
    if (opts_.duplicates < 1) throw std::invalid_argument("MockDetector: duplicates must be >= 1");
    if (opts_.jitter_px < 0.0) throw std::invalid_argument("MockDetector: jitter must be >= 0");
}

std::vector<RawDetection> MockDetector::detect(const Image& img,
                                               const std::vector<VocabEntry>& vocabulary) {
    if (vocabulary.empty()) throw std::invalid_argument("detect: vocabulary must not be empty");
    if (scene_.width < 1 || scene_.height < 1) {
        throw BackendError("mock-detector", img.id, "scene has no extent");
    }
    const double sx = static_cast<double>(img.width()) / scene_.width;
    const double sy = static_cast<double>(img.height()) / scene_.height;
    const double vw = img.width();
    const double vh = img.height();

    std::vector<RawDetection> out;
    for (std::size_t i = 0; i < scene_.shapes.size(); ++i) {
        const SceneShape& shape = scene_.shapes[i];
        const int target = shape.distractor ? shape.reported_class_id : shape.class_id;
        std::vector<const VocabEntry*> matches;
        for (const VocabEntry& entry : vocabulary) {
            if (entry.class_id == target) matches.push_back(&entry);
        }
        if (matches.empty()) continue;
        // Rotate over the class's synonyms by shape index.
        const VocabEntry& entry = *matches[i % matches.size()];

        const BBox base(std::clamp(shape.rect.x_min * sx, 0.0, vw),
                        std::clamp(shape.rect.y_min * sy, 0.0, vh),
                        std::clamp(shape.rect.x_max * sx, 0.0, vw),
                        std::clamp(shape.rect.y_max * sy, 0.0, vh));

        for (int j = 0; j < opts_.duplicates; ++j) {
            BBox box = base;
            if (j > 0 && opts_.jitter_px > 0.0) {
                auto offset = [&](int k) {
                    const std::uint64_t h = hash_combine(
                        hash_combine(hash_combine(opts_.seed, i), static_cast<std::uint64_t>(j)),
                        static_cast<std::uint64_t>(k));
                    return (to_unit(h) * 2.0 - 1.0) * opts_.jitter_px;
                };
                const double x0 = std::clamp(base.x_min + offset(0), 0.0, vw);
                const double y0 = std::clamp(base.y_min + offset(1), 0.0, vh);
                const double x1 = std::clamp(base.x_max + offset(2), 0.0, vw);
                const double y1 = std::clamp(base.y_max + offset(3), 0.0, vh);
                if (x0 < x1 && y0 < y1) box = BBox(x0, y0, x1, y1);
            }
            const double conf = std::clamp(shape.confidence * std::pow(0.9, j), 0.0, 1.0);
            out.push_back({box, entry.text, conf});
        }
    }
    return out;
}

MockScorer::MockScorer(SceneDescription scene, const PromptSet& ps, MockScorerOptions opts)
    : scene_(std::move(scene)), opts_(opts), template_(ps.prompt_template()) {
    if (opts_.epsilon < 0.0 || opts_.epsilon >= 1.0) {
        throw std::invalid_argument("MockScorer: epsilon must be in [0, 1)");
    }
    for (const ClassSpec& spec : ps.classes()) {
        class_candidate_text_[spec.class_id] = apply_template(template_, spec.canonical_name);
    }
    if (!ps.unrelated().empty()) {
        background_text_ = apply_template(template_, ps.unrelated().front());
    }
}

Eigen::VectorXd MockScorer::score(const Image& patch,
                                  const std::vector<std::string>& candidates) {
    if (candidates.empty()) throw std::invalid_argument("score: candidates must not be empty");
    if (patch.channels() < 3) throw BackendError("mock-scorer", patch.id, "expected an RGB patch");

    const int h = patch.height();
    const int w = patch.width();
    const PlaneF& red = patch.planes[0];
    const PlaneF& green = patch.planes[1];
    const PlaneF& blue = patch.planes[2];

    // Bounding window of the red-circle stroke; whole patch when absent.
    int r0 = h, r1 = -1, c0 = w, c1 = -1;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (red(r, c) == 1.f && green(r, c) == 0.f && blue(r, c) == 0.f) {
                r0 = std::min(r0, r);
                r1 = std::max(r1, r);
                c0 = std::min(c0, c);
                c1 = std::max(c1, c);
            }
        }
    }
    if (r1 < 0) {
        r0 = 0;
        r1 = h - 1;
        c0 = 0;
        c1 = w - 1;
    }

    // Majority vote over the shape fill colors inside the window.
    std::map<int, long> votes;
    for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
            if (red(r, c) == 1.f && green(r, c) == 0.f && blue(r, c) == 0.f) continue;
            const auto idx = shape_index_from_color(red(r, c), green(r, c), blue(r, c));
            if (idx && *idx < static_cast<int>(scene_.shapes.size())) ++votes[*idx];
        }
    }

    std::string target_text;
    if (!votes.empty()) {
        const auto best = std::max_element(
            votes.begin(), votes.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
        const SceneShape& shape = scene_.shapes[static_cast<std::size_t>(best->first)];
        if (shape.distractor) {
            target_text = apply_template(template_, shape.distractor_label);
        } else {
            const auto it = class_candidate_text_.find(shape.class_id);
            if (it != class_candidate_text_.end()) target_text = it->second;
        }
    } else {
        target_text = background_text_;
    }

    Eigen::VectorXd scores = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(candidates.size()));
    if (target_text.empty()) return scores;
    const auto it = std::find(candidates.begin(), candidates.end(), target_text);
    if (it == candidates.end()) return scores;
    const Eigen::Index t = std::distance(candidates.begin(), it);

    if (opts_.epsilon > 0.0 && candidates.size() > 1) {
        scores[t] = 1.0 - opts_.epsilon;
        Eigen::Index wrong = opts_.wrong_candidate >= 0
                                 ? static_cast<Eigen::Index>(opts_.wrong_candidate)
                                 : (t + 1) % static_cast<Eigen::Index>(candidates.size());
        if (wrong >= static_cast<Eigen::Index>(candidates.size())) {
            throw std::invalid_argument("MockScorer: wrong_candidate index out of range");
        }
        scores[wrong] += opts_.epsilon;
    } else {
        scores[t] = 1.0;
    }
    return scores;
}

MockSegmenter::MockSegmenter(SceneDescription scene) : scene_(std::move(scene)) {}

MaskPlane MockSegmenter::segment(const Image& img, Point point) {
    if (!img.contains_pixel(point.x, point.y)) {
        throw std::invalid_argument("segment: point outside image bounds");
    }
    if (img.width() != scene_.width || img.height() != scene_.height) {
        throw BackendError("mock-segmenter", img.id, "image extent does not match the scene");
    }
    const int px = static_cast<int>(std::floor(point.x));
    const int py = static_cast<int>(std::floor(point.y));

    // Smallest shape whose rasterized footprint contains the prompt pixel;
    // ties go to the earlier shape.
    int best = -1;
    double best_area = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < scene_.shapes.size(); ++i) {
        const BBox& rect = scene_.shapes[i].rect;
        if (rect_contains_pixel(rect, px, py) && rect.area() < best_area) {
            best = static_cast<int>(i);
            best_area = rect.area();
        }
    }
    if (best < 0) return MaskPlane::Zero(scene_.height, scene_.width);
    return rasterize_rect(scene_.shapes[static_cast<std::size_t>(best)].rect, scene_.height,
                          scene_.width);
}

}  // namespace vtpseg
