#include "vtpseg/clip_filter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vtpseg {

ExtendedPatch extend_patch(const Image& img, const BBox& bbox, double magnification) {
    if (!(magnification >= 1.0) || !std::isfinite(magnification)) {
        throw std::invalid_argument("extend_patch: magnification must be >= 1");
    }
    const double w = img.width();
    const double h = img.height();
    if (bbox.x_min < 0.0 || bbox.y_min < 0.0 || bbox.x_max > w || bbox.y_max > h) {
        throw std::invalid_argument("extend_patch: bbox outside image bounds");
    }

    const Point c = centroid(bbox);
    const double half_w = bbox.width() / 2.0 * magnification;
    const double half_h = bbox.height() / 2.0 * magnification;
    const auto crop = clip_to_image(BBox(c.x - half_w, c.y - half_h, c.x + half_w, c.y + half_h),
                                    w, h);
    if (!crop) throw std::invalid_argument("extend_patch: crop degenerated");

    // Pixel window covering the crop rect.
    const int x0 = std::clamp(static_cast<int>(std::floor(crop->x_min)), 0, img.width() - 1);
    const int y0 = std::clamp(static_cast<int>(std::floor(crop->y_min)), 0, img.height() - 1);
    const int x1 = std::clamp(static_cast<int>(std::ceil(crop->x_max)), x0 + 1, img.width());
    const int y1 = std::clamp(static_cast<int>(std::ceil(crop->y_max)), y0 + 1, img.height());

    ExtendedPatch patch;
    patch.source_bbox = bbox;
    patch.crop_rect = *crop;
    patch.magnification = magnification;
    patch.pixels = crop_window(img, x0, y0, x1, y1);
    patch.circle = {c.x - x0, c.y - y0, bbox.width() / 2.0, bbox.height() / 2.0};
    return patch;
}

int stroke_width(int patch_h, int patch_w) {
    const double diagonal = std::hypot(static_cast<double>(patch_h), static_cast<double>(patch_w));
    return std::max(2, static_cast<int>(std::lround(0.02 * diagonal)));
}

ExtendedPatch draw_red_circle(const ExtendedPatch& patch) {
    if (patch.annotated) throw std::invalid_argument("draw_red_circle: patch already annotated");
    if (patch.pixels.channels() < 3) {
        throw std::invalid_argument("draw_red_circle: patch must have at least 3 channels");
    }

    ExtendedPatch out = patch;
    out.annotated = true;
    const int h = out.pixels.height();
    const int w = out.pixels.width();
    const double width = stroke_width(h, w);
    const EllipseGeometry& e = patch.circle;
    const double rx = std::max(e.radius_x, 1e-9);
    const double ry = std::max(e.radius_y, 1e-9);

    auto paint = [&](int r, int c) {
        out.pixels.planes[0](r, c) = 1.f;
        out.pixels.planes[1](r, c) = 0.f;
        out.pixels.planes[2](r, c) = 0.f;
        for (int ch = 3; ch < out.pixels.channels(); ++ch) out.pixels.planes[ch](r, c) = 0.f;
    };

    // Band of half-width width/2 around the ellipse. Distance to the curve
    // is estimated by the gradient-normalized implicit value |f| / |grad f|
    // with f = (dx/rx)^2 + (dy/ry)^2 - 1, which is first-order exact near
    // the curve.
    long painted = 0;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const double dx = (c + 0.5) - e.center_x;
            const double dy = (r + 0.5) - e.center_y;
            const double f = (dx / rx) * (dx / rx) + (dy / ry) * (dy / ry) - 1.0;
            const double grad = std::hypot(2.0 * dx / (rx * rx), 2.0 * dy / (ry * ry));
            const double dist = grad > 1e-12 ? std::abs(f) / grad : std::min(rx, ry);
            if (dist <= width / 2.0) {
                paint(r, c);
                ++painted;
            }
        }
    }
    if (painted == 0) {
        // Sub-pixel ellipse; mark its center so the annotation is visible.
        const int r = std::clamp(static_cast<int>(std::floor(e.center_y)), 0, h - 1);
        const int c = std::clamp(static_cast<int>(std::floor(e.center_x)), 0, w - 1);
        paint(r, c);
    }
    return out;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& scores) {
    if (scores.size() == 0) throw std::invalid_argument("softmax: empty input");
    const double shift = scores.maxCoeff();
    Eigen::VectorXd exps = (scores.array() - shift).exp();
    return exps / exps.sum();
}

Eigen::Index argmax_lowest(const Eigen::VectorXd& v) {
    if (v.size() == 0) throw std::invalid_argument("argmax_lowest: empty input");
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

SimilarityResult score_patch(const ExtendedPatch& annotated,
                             const std::vector<CandidatePrompt>& candidates,
                             ImageTextScorer& scorer) {
    if (!annotated.annotated) throw std::invalid_argument("score_patch: patch not annotated");
    if (candidates.empty()) throw std::invalid_argument("score_patch: no candidates");

    std::vector<std::string> texts;
    texts.reserve(candidates.size());
    for (const CandidatePrompt& c : candidates) texts.push_back(c.text);

    const Eigen::VectorXd raw = scorer.score(annotated.pixels, texts);
    if (raw.size() != static_cast<Eigen::Index>(candidates.size())) {
        throw BackendError("scorer", annotated.pixels.id,
                           "returned " + std::to_string(raw.size()) + " scores for " +
                               std::to_string(candidates.size()) + " candidates");
    }
    SimilarityResult result;
    result.raw_scores = raw;
    result.probabilities = softmax(raw);
    result.argmax = argmax_lowest(result.probabilities);
    result.matched_class = candidates[static_cast<std::size_t>(result.argmax)].class_id;
    return result;
}

std::vector<FilterRecord> filter_detections_detailed(
    const std::vector<Detection>& dets, const Image& img, const PromptSet& ps,
    ImageTextScorer& scorer, const std::vector<double>& magnifications, const PatchSink& sink) {
    if (magnifications.empty()) {
        throw std::invalid_argument("filter_detections: magnifications must not be empty");
    }
    for (double m : magnifications) {
        if (!(m >= 1.0) || !std::isfinite(m)) {
            throw std::invalid_argument("filter_detections: magnifications must be >= 1");
        }
    }
    const std::vector<CandidatePrompt> candidates = scorer_candidates(ps);

    std::vector<FilterRecord> records;
    records.reserve(dets.size());
    for (std::size_t i = 0; i < dets.size(); ++i) {
        const Detection& det = dets[i];
        SimilarityResult fused;
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(candidates.size()));
        for (double mag : magnifications) {
            const ExtendedPatch annotated = draw_red_circle(extend_patch(img, det.bbox, mag));
            if (sink) sink(static_cast<int>(i), mag, annotated);
            SimilarityResult r = score_patch(annotated, candidates, scorer);
            mean += r.probabilities;
            fused.per_magnification.push_back({mag, r.raw_scores, r.probabilities});
        }
        mean /= static_cast<double>(magnifications.size());
        fused.probabilities = mean;
        fused.argmax = argmax_lowest(mean);
        fused.matched_class = candidates[static_cast<std::size_t>(fused.argmax)].class_id;

        FilterRecord rec;
        rec.detection_index = static_cast<int>(i);
        rec.kept = fused.matched_class.has_value() &&
                   *fused.matched_class == det.canonical_class;
        rec.result = std::move(fused);
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<Detection> filter_detections(const std::vector<Detection>& dets, const Image& img,
                                         const PromptSet& ps, ImageTextScorer& scorer,
                                         const std::vector<double>& magnifications) {
    const std::vector<FilterRecord> records =
        filter_detections_detailed(dets, img, ps, scorer, magnifications);
    std::vector<Detection> kept;
    for (const FilterRecord& rec : records) {
        if (rec.kept) kept.push_back(dets[static_cast<std::size_t>(rec.detection_index)]);
    }
    return kept;
}

}  // namespace vtpseg
