#include "vtpseg/geometry.hpp"
#include "vtpseg/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace vtpseg;

namespace {

// Independent area arithmetic, used as the reference for the library's iou.
double iou_reference(const BBox& a, const BBox& b) {
    const double ox =
        std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
    const double oy =
        std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
    const double inter = ox * oy;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

// Brute-force greedy suppression, written from the rule itself: repeatedly
// take the highest-confidence remaining box (earliest on ties) and remove all
// remaining boxes of the same class overlapping it beyond the threshold.
std::vector<Detection> nms_oracle(const std::vector<Detection>& input, double threshold) {
    std::vector<Detection> rest = input;
    std::vector<Detection> kept;
    while (!rest.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < rest.size(); ++i) {
            if (rest[i].confidence > rest[best].confidence) best = i;
        }
        const Detection top = rest[best];
        kept.push_back(top);
        std::vector<Detection> next;
        for (std::size_t i = 0; i < rest.size(); ++i) {
            if (i == best) continue;
            const bool drop = rest[i].canonical_class == top.canonical_class &&
                              iou_reference(rest[i].bbox, top.bbox) > threshold;
            if (!drop) next.push_back(rest[i]);
        }
        rest = std::move(next);
    }
    return kept;
}

bool same_detection(const Detection& a, const Detection& b) {
    return a.bbox == b.bbox && a.raw_label == b.raw_label &&
           a.canonical_class == b.canonical_class && a.confidence == b.confidence &&
           a.source_scale == b.source_scale;
}

bool same_detections(const std::vector<Detection>& a, const std::vector<Detection>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!same_detection(a[i], b[i])) return false;
    }
    return true;
}

BBox random_box(RandomStream& rs, double w = 100.0, double h = 100.0) {
    const double x0 = rs.next_uniform(0.0, w - 2.0);
    const double y0 = rs.next_uniform(0.0, h - 2.0);
    const double bw = rs.next_uniform(0.5, w - x0);
    const double bh = rs.next_uniform(0.5, h - y0);
    return {x0, y0, x0 + bw, y0 + bh};
}

std::vector<Detection> random_detections(RandomStream& rs, int max_count) {
    const int n = rs.next_int(0, max_count);
    std::vector<Detection> dets;
    for (int i = 0; i < n; ++i) {
        Detection d;
        d.bbox = random_box(rs);
        d.canonical_class = rs.next_int(1, 3);
        d.confidence = rs.next_int(1, 10) / 10.0;  // coarse grid so ties happen
        d.raw_label = "label" + std::to_string(i);
        dets.push_back(d);
    }
    return dets;
}

}  // namespace

TEST_CASE("BBox rejects degenerate extents") {
    CHECK_THROWS_AS(BBox(0, 0, 0, 10), std::invalid_argument);
    CHECK_THROWS_AS(BBox(0, 0, 10, 0), std::invalid_argument);
    CHECK_THROWS_AS(BBox(5, 5, 5, 5), std::invalid_argument);
    CHECK_THROWS_AS(BBox(10, 0, 0, 10), std::invalid_argument);
    CHECK_NOTHROW(BBox(0, 0, 0.001, 0.001));
}

TEST_CASE("iou on the known cases") {
    const BBox a(0, 0, 10, 10);
    CHECK(iou(a, a) == 1.0);
    CHECK(iou(a, BBox(20, 20, 30, 30)) == 0.0);
    // intersection 50, union 150
    CHECK(iou(a, BBox(5, 0, 15, 10)) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("iou is symmetric, bounded, 1 only for identical boxes") {
    RandomStream rs(41);
    for (int i = 0; i < 500; ++i) {
        const BBox a = random_box(rs);
        const BBox b = random_box(rs);
        const double v = iou(a, b);
        CHECK(v == iou(b, a));
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(v == doctest::Approx(iou_reference(a, b)).epsilon(1e-12));
        if (!(a == b)) CHECK(iou(a, b) < 1.0);
    }
}

TEST_CASE("centroid midpoint cases") {
    const Point p = centroid(BBox(0, 0, 10, 20));
    CHECK(p.x == 5.0);
    CHECK(p.y == 10.0);

    const double eps = 0.25;
    const Point q = centroid(BBox(3.0, 7.0, 3.0 + 2 * eps, 7.0 + 2 * eps));
    CHECK(q.x == doctest::Approx(3.0 + eps).epsilon(1e-15));
    CHECK(q.y == doctest::Approx(7.0 + eps).epsilon(1e-15));

    RandomStream rs(17);
    for (int i = 0; i < 100; ++i) {
        const BBox b = random_box(rs);
        const Point c = centroid(b);
        CHECK(c.x == (b.x_min + b.x_max) / 2.0);
        CHECK(c.y == (b.y_min + b.y_max) / 2.0);
        CHECK(c.x > b.x_min);
        CHECK(c.x < b.x_max);
    }
}

TEST_CASE("project_to_original scaling and round trip") {
    CHECK(project_to_original(BBox(0, 0, 10, 10), 1.0) == BBox(0, 0, 10, 10));
    CHECK(project_to_original(BBox(0, 0, 10, 10), 0.5) == BBox(0, 0, 20, 20));
    CHECK_THROWS_AS(project_to_original(BBox(0, 0, 1, 1), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(project_to_original(BBox(0, 0, 1, 1), -2.0), std::invalid_argument);

    RandomStream rs(99);
    for (int i = 0; i < 1000; ++i) {
        const BBox b = random_box(rs);
        const double s = rs.next_uniform(0.1, 3.0);
        // scale then project back
        const BBox scaled(b.x_min * s, b.y_min * s, b.x_max * s, b.y_max * s);
        const BBox back = project_to_original(scaled, s);
        CHECK(back.x_min == doctest::Approx(b.x_min).epsilon(1e-9));
        CHECK(back.y_min == doctest::Approx(b.y_min).epsilon(1e-9));
        CHECK(back.x_max == doctest::Approx(b.x_max).epsilon(1e-9));
        CHECK(back.y_max == doctest::Approx(b.y_max).epsilon(1e-9));
    }
}

TEST_CASE("centroid commutes with projection") {
    RandomStream rs(7);
    for (int i = 0; i < 500; ++i) {
        const BBox b = random_box(rs);
        const double s = rs.next_uniform(0.1, 3.0);
        const Point direct = centroid(project_to_original(b, s));
        const Point via = centroid(b);
        CHECK(direct.x == doctest::Approx(via.x / s).epsilon(1e-9));
        CHECK(direct.y == doctest::Approx(via.y / s).epsilon(1e-9));
    }
}

TEST_CASE("clip_to_image") {
    CHECK(*clip_to_image(BBox(1, 1, 5, 5), 10, 10) == BBox(1, 1, 5, 5));
    CHECK(*clip_to_image(BBox(-3, -3, 5, 5), 10, 10) == BBox(0, 0, 5, 5));
    CHECK(*clip_to_image(BBox(8, 8, 15, 15), 10, 10) == BBox(8, 8, 10, 10));
    CHECK(!clip_to_image(BBox(12, 12, 15, 15), 10, 10).has_value());
}

TEST_CASE("nms known cases") {
    Detection a{BBox(0, 0, 10, 10), "x", 1, 0.9, 1.0};
    Detection b{BBox(0, 0, 10, 10), "y", 1, 0.8, 1.0};

    SUBCASE("single detection passes through") {
        const auto out = nms({a}, 0.1);
        REQUIRE(out.size() == 1);
        CHECK(same_detection(out[0], a));
    }
    SUBCASE("identical boxes of one class collapse to the stronger") {
        const auto out = nms({b, a}, 0.1);
        REQUIRE(out.size() == 1);
        CHECK(same_detection(out[0], a));
    }
    SUBCASE("identical boxes of different classes both survive") {
        Detection c = b;
        c.canonical_class = 2;
        const auto out = nms({a, c}, 0.1);
        CHECK(out.size() == 2);
    }
    SUBCASE("threshold bounds checked") {
        CHECK_THROWS_AS(nms({a}, -0.1), std::invalid_argument);
        CHECK_THROWS_AS(nms({a}, 1.1), std::invalid_argument);
    }
    SUBCASE("empty input") { CHECK(nms({}, 0.1).empty()); }
}

TEST_CASE("nms matches the brute-force oracle") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        RandomStream rs(seed);
        const auto dets = random_detections(rs, 12);
        const double thr = rs.next_int(0, 10) / 10.0;
        const auto fast = nms(dets, thr);
        const auto slow = nms_oracle(dets, thr);
        CHECK(same_detections(fast, slow));
    }
}

TEST_CASE("nms output properties") {
    RandomStream rs(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const auto dets = random_detections(rs, 12);
        const double thr = 0.1;
        const auto kept = nms(dets, thr);

        // subset of the input
        for (const Detection& k : kept) {
            CHECK(std::any_of(dets.begin(), dets.end(),
                              [&](const Detection& d) { return same_detection(d, k); }));
        }
        // no same-class pair overlaps beyond the threshold
        for (std::size_t i = 0; i < kept.size(); ++i) {
            for (std::size_t j = i + 1; j < kept.size(); ++j) {
                if (kept[i].canonical_class != kept[j].canonical_class) continue;
                CHECK(iou(kept[i].bbox, kept[j].bbox) <= thr);
            }
        }
        // idempotent
        CHECK(same_detections(nms(kept, thr), kept));
    }
}

TEST_CASE("remove_oversized") {
    const double w = 100, h = 100;
    Detection full{BBox(0, 0, 100, 100), "x", 1, 0.9, 1.0};
    Detection half{BBox(0, 0, 100, 50), "x", 1, 0.9, 1.0};

    CHECK(remove_oversized({full}, w, h, 0.9).empty());
    CHECK(remove_oversized({half}, w, h, 0.9).size() == 1);
    CHECK_THROWS_AS(remove_oversized({full}, w, h, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(remove_oversized({full}, w, h, 1.5), std::invalid_argument);

    SUBCASE("matches a per-box area comparison") {
        RandomStream rs(5);
        std::vector<Detection> dets = random_detections(rs, 10);
        const double frac = 0.25;
        const auto kept = remove_oversized(dets, 100, 100, frac);
        std::vector<Detection> expected;
        for (const Detection& d : dets) {
            if (d.bbox.area() <= frac * 100 * 100) expected.push_back(d);
        }
        CHECK(same_detections(kept, expected));
    }
    SUBCASE("fraction 1.0 is the identity on clipped boxes") {
        RandomStream rs(6);
        const auto dets = random_detections(rs, 10);
        CHECK(same_detections(remove_oversized(dets, 100, 100, 1.0), dets));
    }
}
