#pragma once

#include "vtpseg/backends.hpp"
#include "vtpseg/geometry.hpp"
#include "vtpseg/image.hpp"
#include "vtpseg/prompts.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace vtpseg {

// Ellipse in patch coordinates (relative to the crop's pixel-window origin).
struct EllipseGeometry {
    double center_x = 0.0;
    double center_y = 0.0;
    double radius_x = 0.0;
    double radius_y = 0.0;
};

// A magnified crop around one detection. The circle is the ellipse inscribed
// in the ORIGINAL bbox's footprint within the patch, not in the crop.
struct ExtendedPatch {
    BBox source_bbox;          // original-image coordinates
    BBox crop_rect;            // original-image coordinates, clipped to the image
    double magnification = 1.0;
    Image pixels;              // integer-window crop covering crop_rect
    EllipseGeometry circle;
    bool annotated = false;
};

// Crop rect = bbox scaled about its center by magnification, intersected
// with the image bounds. Requires magnification >= 1 and bbox inside the
// image.
ExtendedPatch extend_patch(const Image& img, const BBox& bbox, double magnification);

// Stroke width rule used by the red-circle annotation.
int stroke_width(int patch_h, int patch_w);  // max(2, round(0.02 * diagonal))

// Rasterizes the stored ellipse as a pure-red stroke (first channel at full
// intensity, others zero) onto a copy of the pixels. A patch may only be
// annotated once; pixels off the stroke stay bit-identical.
ExtendedPatch draw_red_circle(const ExtendedPatch& patch);

// Numerically stable softmax (max subtraction).
Eigen::VectorXd softmax(const Eigen::VectorXd& scores);

// Smallest index attaining the maximum.
Eigen::Index argmax_lowest(const Eigen::VectorXd& v);

struct MagnificationScore {
    double magnification = 0.0;
    Eigen::VectorXd raw_scores;
    Eigen::VectorXd probabilities;
};

struct SimilarityResult {
    Eigen::VectorXd raw_scores;     // empty when fused across magnifications
    Eigen::VectorXd probabilities;  // softmax, or the mean of per-magnification softmaxes
    Eigen::Index argmax = 0;        // lowest index attaining the max probability
    std::optional<int> matched_class;  // class of the argmax candidate; none if unrelated
    std::vector<MagnificationScore> per_magnification;
};

// Scores one annotated patch against the candidate prompts.
SimilarityResult score_patch(const ExtendedPatch& annotated,
                             const std::vector<CandidatePrompt>& candidates,
                             ImageTextScorer& scorer);

struct FilterRecord {
    int detection_index = 0;
    bool kept = false;
    SimilarityResult result;
};

// Optional observer invoked with every annotated patch (debug dumps).
using PatchSink = std::function<void(int detection_index, double magnification,
                                     const ExtendedPatch& annotated)>;

// The keep/reject decision per detection: per-magnification annotated
// patches are scored, softmax probabilities are averaged across
// magnifications, and the detection is kept iff the argmax candidate is
// task-related and equal to the detection's canonical class.
std::vector<FilterRecord> filter_detections_detailed(
    const std::vector<Detection>& dets, const Image& img, const PromptSet& ps,
    ImageTextScorer& scorer, const std::vector<double>& magnifications,
    const PatchSink& sink = {});

std::vector<Detection> filter_detections(const std::vector<Detection>& dets, const Image& img,
                                         const PromptSet& ps, ImageTextScorer& scorer,
                                         const std::vector<double>& magnifications);

}  // namespace vtpseg
