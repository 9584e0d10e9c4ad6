#pragma once

#include <optional>
#include <string>
#include <vector>

namespace vtpseg {

// Axis-aligned box in continuous pixel coordinates. Origin is the top-left
// corner of the original image, x grows rightward, y grows downward.
// Extents must be strictly positive; degenerate boxes are rejected.
struct BBox {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    BBox() = default;
    BBox(double x0, double y0, double x1, double y1);

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }

    bool operator==(const BBox&) const = default;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// One detector hit, always expressed in original-image coordinates no matter
// which scaled view produced it.
struct Detection {
    BBox bbox;
    std::string raw_label;      // the synonym the detector matched
    int canonical_class = 0;    // >= 1; 0 is reserved for background
    double confidence = 0.0;    // in [0, 1]
    double source_scale = 1.0;  // scale factor of the view the box was found at
};

double iou(const BBox& a, const BBox& b);

Point centroid(const BBox& b);

// Maps a box expressed in a scaled view back to original-image coordinates
// (every coordinate divided by scale). Rejects scale <= 0.
BBox project_to_original(const BBox& b, double scale);

// Intersects the box with [0,w] x [0,h]; nullopt when nothing remains.
std::optional<BBox> clip_to_image(const BBox& b, double w, double h);

// Greedy suppression within each canonical class: highest confidence first
// (ties keep input order); remaining same-class boxes with iou > threshold
// are dropped. Output preserves acceptance order.
std::vector<Detection> nms(const std::vector<Detection>& dets, double overlap_threshold);

// Drops detections whose box area exceeds max_area_fraction of the image area.
std::vector<Detection> remove_oversized(const std::vector<Detection>& dets,
                                        double image_w, double image_h,
                                        double max_area_fraction);

}  // namespace vtpseg
