#pragma once

#include "vtpseg/backends.hpp"
#include "vtpseg/prompts.hpp"
#include "vtpseg/scene.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace vtpseg {

// Noise model for the mock detector: every shape is emitted `duplicates`
// times; copy j carries confidence conf * 0.9^j, and copies j >= 1 are
// jittered by at most jitter_px per coordinate. Deterministic given the seed.
struct MockDetectorOptions {
    int duplicates = 1;
    double jitter_px = 0.0;
    std::uint64_t seed = 0;
};

// Echoes the scene: one raw detection per shape whose (reported) class is in
// the vocabulary, expressed in the coordinates of the view it is given.
class MockDetector : public Detector {
  public:
    explicit MockDetector(SceneDescription scene, MockDetectorOptions opts = {});
    std::vector<RawDetection> detect(const Image& img,
                                     const std::vector<VocabEntry>& vocabulary) override;

  private:
    SceneDescription scene_;
    MockDetectorOptions opts_;
};

struct MockScorerOptions {
    double epsilon = 0.0;       // confusion mass moved to a wrong candidate
    int wrong_candidate = -1;   // -1: the candidate after the true one, cyclically
};

// Oracle scorer: locates the red-circle stroke in the patch, reads the shape
// fill color inside it, and scores 1 (or 1 - epsilon) on the candidate text
// of that shape's class — or of its unrelated label for distractors.
class MockScorer : public ImageTextScorer {
  public:
    MockScorer(SceneDescription scene, const PromptSet& ps, MockScorerOptions opts = {});
    Eigen::VectorXd score(const Image& patch,
                          const std::vector<std::string>& candidates) override;

  private:
    SceneDescription scene_;
    MockScorerOptions opts_;
    std::map<int, std::string> class_candidate_text_;
    std::string template_;
    std::string background_text_;  // first unrelated candidate, templated
};

// Oracle segmenter: returns the exact pixel mask of the smallest scene shape
// containing the prompt pixel, or an empty mask on background.
class MockSegmenter : public PointSegmenter {
  public:
    explicit MockSegmenter(SceneDescription scene);
    MaskPlane segment(const Image& img, Point point) override;

  private:
    SceneDescription scene_;
};

}  // namespace vtpseg
