#pragma once

#include "vtpseg/geometry.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vtpseg {

// Filter-stage verdict for one detection; absent when the filter is disabled.
struct FilterOutcome {
    bool kept = false;
    int argmax = 0;
    std::optional<int> matched_class;
    std::vector<double> averaged_probabilities;
};

struct DetectionRecord {
    BBox bbox;
    std::string raw_label;
    int canonical_class = 0;
    double confidence = 0.0;
    double source_scale = 1.0;
    std::optional<FilterOutcome> filter;
};

// One manifest line per image. Counts are monotone:
// post_filter <= post_nms <= raw.
struct ImageRecord {
    std::string image;
    int width = 0;
    int height = 0;
    std::vector<std::pair<double, int>> raw_per_scale;
    int raw_count = 0;
    int post_nms_count = 0;
    int post_filter_count = 0;
    int empty_mask_count = 0;
    double elapsed_ms = 0.0;  // wall clock; the only field exempt from the
                              // bit-identical rerun guarantee
    std::optional<std::string> error;
    std::vector<DetectionRecord> detections;
};

// Line-delimited JSON, one record per image.
void write_manifest(const std::string& path, const std::vector<ImageRecord>& records);
std::vector<ImageRecord> read_manifest(const std::string& path);

std::string record_to_json_line(const ImageRecord& record);

}  // namespace vtpseg
