#pragma once

#include "vtpseg/backends.hpp"
#include "vtpseg/geometry.hpp"
#include "vtpseg/image.hpp"
#include "vtpseg/prompts.hpp"

#include <utility>
#include <vector>

namespace vtpseg {

struct ScaledView {
    double scale = 1.0;
    Image view;  // size (round(scale * H), round(scale * W))
};

struct GdPlusConfig {
    std::vector<double> scales{0.5, 1.0};
    double nms_overlap_threshold = 0.1;
    double max_area_fraction = 0.9;
    double min_confidence = 0.0;

    // Both scale sets are in use; two scales is the experimental default.
    static GdPlusConfig two_scale_preset() { return {}; }
    static GdPlusConfig three_scale_preset() {
        GdPlusConfig cfg;
        cfg.scales = {0.5, 1.0, 1.5};
        return cfg;
    }

    void validate() const;
};

// Per-stage counters for the run manifest.
struct GdPlusTrace {
    std::vector<std::pair<double, int>> raw_per_scale;
    int raw_total = 0;
    int post_suppression = 0;
};

// One view per scale via bilinear resampling; scale 1.0 returns the original
// pixels unchanged. Rejects any scale producing a dimension < 1.
std::vector<ScaledView> generate_scaled_views(const Image& img, const std::vector<double>& scales);

// The detection stage: per-view detection, projection to original
// coordinates, canonicalization, confidence gating, oversized-box pruning,
// then per-class NMS.
std::vector<Detection> gd_plus(const Image& img, const PromptSet& ps, Detector& det,
                               const GdPlusConfig& cfg, GdPlusTrace* trace = nullptr);

}  // namespace vtpseg
