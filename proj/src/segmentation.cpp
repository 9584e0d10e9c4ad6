#include "vtpseg/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace vtpseg {

LabelMask::LabelMask(int height, int width, int class_number)
    : labels(Plane<std::uint8_t>::Zero(height, width)), class_number(class_number) {
    if (height < 1 || width < 1) throw std::invalid_argument("LabelMask: empty extent");
    if (class_number < 0 || class_number > 255) {
        throw std::invalid_argument("LabelMask: class_number must be in [0, 255]");
    }
}

LabelMask::LabelMask(Plane<std::uint8_t> values, int class_number_)
    : labels(std::move(values)), class_number(class_number_) {
    if (labels.rows() < 1 || labels.cols() < 1) {
        throw std::invalid_argument("LabelMask: empty extent");
    }
    if (class_number < 0 || class_number > 255) {
        throw std::invalid_argument("LabelMask: class_number must be in [0, 255]");
    }
    if (static_cast<int>(labels.maxCoeff()) > class_number) {
        throw std::invalid_argument("LabelMask: label value exceeds class_number");
    }
}

Point prompt_point(const BBox& bbox, int image_w, int image_h) {
    const Point c = centroid(bbox);
    double x = std::round(c.x);  // std::round is half away from zero
    double y = std::round(c.y);
    x = std::clamp(x, 0.0, static_cast<double>(image_w - 1));
    y = std::clamp(y, 0.0, static_cast<double>(image_h - 1));
    return {x, y};
}

std::vector<InstanceMask> segment_all(const Image& img, const std::vector<Detection>& dets,
                                      PointSegmenter& seg) {
    const int w = img.width();
    const int h = img.height();
    std::vector<InstanceMask> instances;
    instances.reserve(dets.size());
    for (std::size_t i = 0; i < dets.size(); ++i) {
        const Detection& det = dets[i];
        if (det.bbox.x_min < 0.0 || det.bbox.y_min < 0.0 || det.bbox.x_max > w ||
            det.bbox.y_max > h) {
            throw std::invalid_argument("segment_all: detection box outside image bounds");
        }
        const Point prompt = prompt_point(det.bbox, w, h);
        MaskPlane mask;
        try {
            mask = seg.segment(img, prompt);
        } catch (const BackendError& e) {
            throw BackendError(e.backend(), e.image_id(),
                               std::string(e.what()) + " (detection #" + std::to_string(i) +
                                   ", class " + std::to_string(det.canonical_class) + ")");
        }
        if (mask.rows() != h || mask.cols() != w) {
            throw BackendError("segmenter", img.id, "mask extent does not match the image");
        }
        InstanceMask inst;
        inst.mask = std::move(mask);
        inst.detection = det;
        inst.detection_index = static_cast<int>(i);
        inst.is_empty = !(inst.mask != 0).any();
        instances.push_back(std::move(inst));
    }
    return instances;
}

LabelMask assemble_label_mask(const std::vector<InstanceMask>& instances,
                              int height, int width, int class_number) {
    LabelMask out(height, width, class_number);
    // Per-pixel winner bookkeeping: higher confidence wins, ties go to the
    // earlier detection index, so the result is independent of input order.
    Plane<double> best_conf = Plane<double>::Constant(height, width, -1.0);
    Plane<int> best_index = Plane<int>::Constant(height, width, std::numeric_limits<int>::max());

    for (const InstanceMask& inst : instances) {
        const int cls = inst.detection.canonical_class;
        if (cls < 1 || cls > class_number) {
            throw std::invalid_argument("assemble_label_mask: class id outside [1, class_number]");
        }
        if (inst.mask.rows() != height || inst.mask.cols() != width) {
            throw std::invalid_argument("assemble_label_mask: mask extent mismatch");
        }
        const double conf = inst.detection.confidence;
        for (int r = 0; r < height; ++r) {
            for (int c = 0; c < width; ++c) {
                if (inst.mask(r, c) == 0) continue;
                if (conf > best_conf(r, c) ||
                    (conf == best_conf(r, c) && inst.detection_index < best_index(r, c))) {
                    best_conf(r, c) = conf;
                    best_index(r, c) = inst.detection_index;
                    out.labels(r, c) = static_cast<std::uint8_t>(cls);
                }
            }
        }
    }
    return out;
}

}  // namespace vtpseg
