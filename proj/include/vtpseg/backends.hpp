#pragma once

#include "vtpseg/errors.hpp"
#include "vtpseg/geometry.hpp"
#include "vtpseg/image.hpp"
#include "vtpseg/prompts.hpp"

#include <Eigen/Dense>

#include <vector>

namespace vtpseg {

// A single detector hit in the coordinate frame of the image it was given.
struct RawDetection {
    BBox bbox;
    std::string raw_label;   // one of the vocabulary texts
    double confidence = 0.0; // in [0, 1]
};

// Text-prompted object detector. A backend instance is not required to be
// concurrently callable; the pipeline serializes calls to one instance.
class Detector {
  public:
    virtual ~Detector() = default;
    virtual std::vector<RawDetection> detect(const Image& img,
                                             const std::vector<VocabEntry>& vocabulary) = 0;
};

// Image-text similarity scorer. Returns one raw (unnormalized) score per
// candidate, same order; the caller applies softmax.
class ImageTextScorer {
  public:
    virtual ~ImageTextScorer() = default;
    virtual Eigen::VectorXd score(const Image& patch,
                                  const std::vector<std::string>& candidates) = 0;
};

// Point-prompted segmenter. Returns a binary H x W mask of the object at or
// near the prompt point. The point must lie inside the image.
class PointSegmenter {
  public:
    virtual ~PointSegmenter() = default;
    virtual MaskPlane segment(const Image& img, Point point) = 0;
};

}  // namespace vtpseg
