#pragma once

#include "vtpseg/backends.hpp"

#include <memory>
#include <string>

namespace vtpseg {

// Base64 helpers for the JSON wire format.
std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

// Adapters that forward backend calls to external model servers over a small
// JSON/PNG protocol (see README). The URL carries host, port and path,
// e.g. "http://127.0.0.1:8800/detect". Images travel as base64 8-bit PNG.
//
// These are thin glue for hosted detector/scorer/segmenter models; the
// models themselves live behind the endpoint.
class HttpDetector : public Detector {
  public:
    explicit HttpDetector(const std::string& url, int timeout_sec = 120);
    ~HttpDetector() override;
    std::vector<RawDetection> detect(const Image& img,
                                     const std::vector<VocabEntry>& vocabulary) override;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

class HttpScorer : public ImageTextScorer {
  public:
    explicit HttpScorer(const std::string& url, int timeout_sec = 120);
    ~HttpScorer() override;
    Eigen::VectorXd score(const Image& patch,
                          const std::vector<std::string>& candidates) override;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

class HttpSegmenter : public PointSegmenter {
  public:
    explicit HttpSegmenter(const std::string& url, int timeout_sec = 120);
    ~HttpSegmenter() override;
    MaskPlane segment(const Image& img, Point point) override;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace vtpseg
