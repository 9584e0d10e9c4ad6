#include "vtpseg/detection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vtpseg {

void GdPlusConfig::validate() const {
    if (scales.empty()) throw std::invalid_argument("GdPlusConfig: scales must not be empty");
    for (double s : scales) {
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw std::invalid_argument("GdPlusConfig: scales must be finite and > 0");
        }
    }
    if (!(nms_overlap_threshold >= 0.0 && nms_overlap_threshold <= 1.0)) {
        throw std::invalid_argument("GdPlusConfig: nms_overlap_threshold must be in [0,1]");
    }
    if (!(max_area_fraction > 0.0 && max_area_fraction <= 1.0)) {
        throw std::invalid_argument("GdPlusConfig: max_area_fraction must be in (0,1]");
    }
    if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) {
        throw std::invalid_argument("GdPlusConfig: min_confidence must be in [0,1]");
    }
}

std::vector<ScaledView> generate_scaled_views(const Image& img,
                                              const std::vector<double>& scales) {
    std::vector<ScaledView> views;
    views.reserve(scales.size());
    for (double s : scales) {
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw std::invalid_argument("generate_scaled_views: scale must be > 0");
        }
        if (s == 1.0) {
            views.push_back({1.0, img});
            continue;
        }
        const int out_h = static_cast<int>(std::lround(s * img.height()));
        const int out_w = static_cast<int>(std::lround(s * img.width()));
        if (out_h < 1 || out_w < 1) {
            throw std::invalid_argument("generate_scaled_views: scale produces an empty view");
        }
        views.push_back({s, resize_bilinear(img, out_h, out_w)});
    }
    return views;
}

std::vector<Detection> gd_plus(const Image& img, const PromptSet& ps, Detector& det,
                               const GdPlusConfig& cfg, GdPlusTrace* trace) {
    cfg.validate();
    const std::vector<VocabEntry> vocab = detector_vocabulary(ps);
    if (vocab.empty()) throw std::invalid_argument("gd_plus: empty detector vocabulary");

    const double w = img.width();
    const double h = img.height();
    std::vector<Detection> merged;
    for (const ScaledView& view : generate_scaled_views(img, cfg.scales)) {
        const std::vector<RawDetection> raw = det.detect(view.view, vocab);
        if (trace) {
            trace->raw_per_scale.emplace_back(view.scale, static_cast<int>(raw.size()));
            trace->raw_total += static_cast<int>(raw.size());
        }
        for (const RawDetection& rd : raw) {
            const auto clipped = clip_to_image(project_to_original(rd.bbox, view.scale), w, h);
            if (!clipped) continue;
            const auto cls = canonicalize(rd.raw_label, ps);
            if (!cls) continue;
            const double conf = std::clamp(rd.confidence, 0.0, 1.0);
            if (conf < cfg.min_confidence) continue;
            merged.push_back({*clipped, rd.raw_label, *cls, conf, view.scale});
        }
    }

    merged = remove_oversized(merged, w, h, cfg.max_area_fraction);
    std::vector<Detection> kept = nms(merged, cfg.nms_overlap_threshold);
    if (trace) trace->post_suppression = static_cast<int>(kept.size());
    return kept;
}

}  // namespace vtpseg
