#include "vtpseg/metrics.hpp"

#include <cstdio>
#include <stdexcept>

namespace vtpseg {

ConfusionMatrix::ConfusionMatrix(int class_number) : class_number_(class_number) {
    if (class_number < 1 || class_number > 255) {
        throw std::invalid_argument("ConfusionMatrix: class_number must be in [1, 255]");
    }
    counts_ = Counts::Zero(class_number + 1, class_number + 1);
}

void ConfusionMatrix::accumulate(const LabelMask& pred, const LabelMask& gt) {
    if (pred.height() != gt.height() || pred.width() != gt.width()) {
        throw std::invalid_argument("ConfusionMatrix: pred/gt dimension mismatch");
    }
    if (pred.class_number != class_number_ || gt.class_number != class_number_) {
        throw std::invalid_argument("ConfusionMatrix: class_number mismatch");
    }
    for (int r = 0; r < gt.height(); ++r) {
        for (int c = 0; c < gt.width(); ++c) {
            ++counts_(gt.labels(r, c), pred.labels(r, c));
        }
    }
    ++images_;
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
    if (other.class_number_ != class_number_) {
        throw std::invalid_argument("ConfusionMatrix: class_number mismatch");
    }
    counts_ += other.counts_;
    images_ += other.images_;
}

EvalReport compute_report(const ConfusionMatrix& cm) {
    const auto& m = cm.counts();
    const int k = cm.class_number();

    EvalReport report;
    report.image_count = cm.images_accumulated();
    report.total_pixels = cm.total();

    double iou_sum = 0, prec_sum = 0, rec_sum = 0, dice_sum = 0;
    int iou_n = 0, prec_n = 0, rec_n = 0, dice_n = 0;
    for (int c = 1; c <= k; ++c) {
        const std::int64_t tp = m(c, c);
        const std::int64_t fn = m.row(c).sum() - tp;
        const std::int64_t fp = m.col(c).sum() - tp;
        if (tp + fp + fn == 0) continue;  // absent from both gt and pred

        ClassMetrics cls;
        cls.class_id = c;
        cls.tp = tp;
        cls.fp = fp;
        cls.fn = fn;
        cls.iou = static_cast<double>(tp) / static_cast<double>(tp + fp + fn);
        iou_sum += *cls.iou;
        ++iou_n;
        if (tp + fp > 0) {
            cls.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
            prec_sum += *cls.precision;
            ++prec_n;
        }
        if (tp + fn > 0) {
            cls.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
            rec_sum += *cls.recall;
            ++rec_n;
        }
        cls.dice = 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
        dice_sum += *cls.dice;
        ++dice_n;
        report.per_class.push_back(cls);
    }

    if (iou_n > 0) report.miou = iou_sum / iou_n;
    if (prec_n > 0) report.pixel_precision = prec_sum / prec_n;
    if (rec_n > 0) report.pixel_recall = rec_sum / rec_n;
    if (dice_n > 0) report.dice = dice_sum / dice_n;
    if (report.total_pixels > 0) {
        report.pixel_accuracy =
            static_cast<double>(m.trace()) / static_cast<double>(report.total_pixels);
    }
    return report;
}

namespace {

std::string fmt_metric(const std::optional<double>& v) {
    if (!v) return "   -  ";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%6.4f", *v);
    return buf;
}

}  // namespace

std::string format_report_table(const EvalReport& report) {
    std::string out;
    out += "class    MIoU    Pixel Precision  Pixel Recall  Dice\n";
    for (const ClassMetrics& c : report.per_class) {
        char line[160];
        std::snprintf(line, sizeof line, "%5d    %s  %s           %s        %s\n", c.class_id,
                      fmt_metric(c.iou).c_str(), fmt_metric(c.precision).c_str(),
                      fmt_metric(c.recall).c_str(), fmt_metric(c.dice).c_str());
        out += line;
    }
    char agg[256];
    std::snprintf(agg, sizeof agg,
                  "mean     MIoU=%s  PA=%s  PP=%s  PR=%s  Dice=%s  (%lld images, %lld px)\n",
                  fmt_metric(report.miou).c_str(), fmt_metric(report.pixel_accuracy).c_str(),
                  fmt_metric(report.pixel_precision).c_str(),
                  fmt_metric(report.pixel_recall).c_str(), fmt_metric(report.dice).c_str(),
                  static_cast<long long>(report.image_count),
                  static_cast<long long>(report.total_pixels));
    out += agg;
    return out;
}

}  // namespace vtpseg
