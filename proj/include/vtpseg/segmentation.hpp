#pragma once

#include "vtpseg/backends.hpp"
#include "vtpseg/geometry.hpp"
#include "vtpseg/image.hpp"

#include <cstdint>
#include <vector>

namespace vtpseg {

// H x W per-pixel class labels in [0, class_number]; 0 is background.
struct LabelMask {
    Plane<std::uint8_t> labels;
    int class_number = 0;

    LabelMask() = default;
    LabelMask(int height, int width, int class_number);            // all background
    LabelMask(Plane<std::uint8_t> labels, int class_number);       // validates the range

    int height() const { return static_cast<int>(labels.rows()); }
    int width() const { return static_cast<int>(labels.cols()); }
};

// One segmented object: binary image-sized mask paired with its detection.
struct InstanceMask {
    MaskPlane mask;
    Detection detection;
    int detection_index = 0;
    bool is_empty = false;  // no pixel labeled; kept for diagnostics
};

// Centroid rounded to the nearest pixel (half away from zero), clamped to
// the pixel grid. This is the segmenter's point prompt.
Point prompt_point(const BBox& bbox, int image_w, int image_h);

// One segmenter call per detection, in order; empty masks are retained and
// flagged. Backend failures are rethrown with the detection attached.
std::vector<InstanceMask> segment_all(const Image& img, const std::vector<Detection>& dets,
                                      PointSegmenter& seg);

// Paints instance masks into a single label map. Overlaps are resolved by
// higher detection confidence; ties go to the earlier detection index.
LabelMask assemble_label_mask(const std::vector<InstanceMask>& instances,
                              int height, int width, int class_number);

}  // namespace vtpseg
