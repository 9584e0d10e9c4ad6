#include "vtpseg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vtpseg {

BBox::BBox(double x0, double y0, double x1, double y1)
    : x_min(x0), y_min(y0), x_max(x1), y_max(y1) {
    if (!(std::isfinite(x0) && std::isfinite(y0) && std::isfinite(x1) && std::isfinite(y1))) {
        throw std::invalid_argument("BBox: coordinates must be finite");
    }
    if (!(x_min < x_max && y_min < y_max)) {
        throw std::invalid_argument("BBox: extents must be strictly positive");
    }
}

double iou(const BBox& a, const BBox& b) {
    const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    const double inter = iw * ih;
    return inter / (a.area() + b.area() - inter);
}

Point centroid(const BBox& b) {
    return {(b.x_min + b.x_max) / 2.0, (b.y_min + b.y_max) / 2.0};
}

BBox project_to_original(const BBox& b, double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw std::invalid_argument("project_to_original: scale must be > 0");
    }
    return {b.x_min / scale, b.y_min / scale, b.x_max / scale, b.y_max / scale};
}

std::optional<BBox> clip_to_image(const BBox& b, double w, double h) {
    const double x0 = std::clamp(b.x_min, 0.0, w);
    const double y0 = std::clamp(b.y_min, 0.0, h);
    const double x1 = std::clamp(b.x_max, 0.0, w);
    const double y1 = std::clamp(b.y_max, 0.0, h);
    if (!(x0 < x1 && y0 < y1)) return std::nullopt;
    return BBox(x0, y0, x1, y1);
}

std::vector<Detection> nms(const std::vector<Detection>& dets, double overlap_threshold) {
    if (!(overlap_threshold >= 0.0 && overlap_threshold <= 1.0)) {
        throw std::invalid_argument("nms: overlap_threshold must be in [0,1]");
    }
    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dets[a].confidence > dets[b].confidence;
    });

    std::vector<Detection> kept;
    std::vector<bool> suppressed(dets.size(), false);
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (suppressed[order[i]]) continue;
        const Detection& top = dets[order[i]];
        kept.push_back(top);
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            const Detection& other = dets[order[j]];
            if (suppressed[order[j]] || other.canonical_class != top.canonical_class) continue;
            if (iou(top.bbox, other.bbox) > overlap_threshold) suppressed[order[j]] = true;
        }
    }
    return kept;
}

std::vector<Detection> remove_oversized(const std::vector<Detection>& dets,
                                        double image_w, double image_h,
                                        double max_area_fraction) {
    if (!(max_area_fraction > 0.0 && max_area_fraction <= 1.0)) {
        throw std::invalid_argument("remove_oversized: max_area_fraction must be in (0,1]");
    }
    const double limit = max_area_fraction * image_w * image_h;
    std::vector<Detection> kept;
    kept.reserve(dets.size());
    for (const Detection& d : dets) {
        if (d.bbox.area() <= limit) kept.push_back(d);
    }
    return kept;
}

}  // namespace vtpseg
