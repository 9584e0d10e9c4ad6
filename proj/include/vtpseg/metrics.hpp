#pragma once

#include "vtpseg/segmentation.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vtpseg {

// (class_number + 1)^2 pixel counts: rows = ground truth, columns =
// prediction, index 0 = background. Accumulation is elementwise-additive,
// so partial matrices from parallel workers merge cleanly.
class ConfusionMatrix {
  public:
    using Counts = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

    explicit ConfusionMatrix(int class_number);

    void accumulate(const LabelMask& pred, const LabelMask& gt);
    void merge(const ConfusionMatrix& other);

    const Counts& counts() const { return counts_; }
    int class_number() const { return class_number_; }
    std::int64_t total() const { return counts_.sum(); }
    std::int64_t images_accumulated() const { return images_; }

  private:
    int class_number_;
    Counts counts_;
    std::int64_t images_ = 0;
};

struct ClassMetrics {
    int class_id = 0;
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::optional<double> iou;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> dice;
};

// Macro-averages run over foreground classes present in gt or pred; a metric
// whose denominator is zero for a class is undefined and excluded from its
// mean rather than counted as 0 or 1. Background enters only pixel_accuracy.
struct EvalReport {
    std::optional<double> miou;
    std::optional<double> pixel_accuracy;
    std::optional<double> pixel_precision;
    std::optional<double> pixel_recall;
    std::optional<double> dice;
    std::vector<ClassMetrics> per_class;  // classes present in gt or pred
    std::int64_t image_count = 0;
    std::int64_t total_pixels = 0;
};

EvalReport compute_report(const ConfusionMatrix& cm);

// Human-readable table, one row per class plus the aggregate line.
std::string format_report_table(const EvalReport& report);

}  // namespace vtpseg
