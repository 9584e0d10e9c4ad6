#pragma once

#include "vtpseg/geometry.hpp"
#include "vtpseg/image.hpp"
#include "vtpseg/segmentation.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vtpseg {

// One synthetic object. Distractors are objects whose true class lies outside
// the task set: they stay background in the ground truth, the mock detector
// mislabels them as reported_class_id, and the oracle scorer matches them to
// the unrelated prompt named by distractor_label.
struct SceneShape {
    BBox rect;                     // original-image pixel coordinates
    int class_id = 0;              // task class; 0 for distractors
    double confidence = 1.0;       // confidence the mock detector reports
    bool distractor = false;
    std::string distractor_label;
    int reported_class_id = 0;
};

// Synthetic ground truth driving the mock backends.
struct SceneDescription {
    int width = 0;
    int height = 0;
    std::vector<SceneShape> shapes;  // painted in order; later shapes on top
};

// Pixel-center coverage: pixel (y, x) is covered iff its center
// (x + 0.5, y + 0.5) lies inside the rect. Both the ground truth and the
// mock segmenter rasterize through this one rule.
MaskPlane rasterize_rect(const BBox& rect, int height, int width);
bool rect_contains_pixel(const BBox& rect, int x, int y);

// Flat fill color unique to each shape index. Encodes the index in the red
// and green channels with a fixed blue marker, so it is never pure red and
// never black; the oracle scorer decodes it to identify the shape.
std::array<float, 3> shape_fill_color(int shape_index);
std::optional<int> shape_index_from_color(float r, float g, float b);

// Rasterizes the scene into an RGB image: black background, one flat fill
// color per shape.
Image render_scene(const SceneDescription& scene, const std::string& id = {});

// The per-pixel task labels the pipeline is evaluated against.
LabelMask scene_ground_truth(const SceneDescription& scene, int class_number);

using SceneMap = std::map<std::string, SceneDescription>;

// Scene file: JSON object mapping image stems to scene descriptions.
SceneMap load_scene_file(const std::string& path);
void save_scene_file(const std::string& path, const SceneMap& scenes);

}  // namespace vtpseg
