#include "vtpseg/detection.hpp"
#include "vtpseg/mock_backends.hpp"

#include <doctest.h>

#include <algorithm>

using namespace vtpseg;

namespace {

PromptSet demo_prompts() {
    return PromptSet({{1, "building", {"roof", "building"}}, {2, "lake", {"lake"}}},
                     {"ground"});
}

bool same_box(const BBox& a, const BBox& b, double tol) {
    return std::abs(a.x_min - b.x_min) <= tol && std::abs(a.y_min - b.y_min) <= tol &&
           std::abs(a.x_max - b.x_max) <= tol && std::abs(a.y_max - b.y_max) <= tol;
}

std::vector<Detection> sorted_canonically(std::vector<Detection> dets) {
    std::sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
        return std::tie(a.canonical_class, a.bbox.x_min, a.bbox.y_min, a.bbox.x_max,
                        a.bbox.y_max, a.confidence) <
               std::tie(b.canonical_class, b.bbox.x_min, b.bbox.y_min, b.bbox.x_max,
                        b.bbox.y_max, b.confidence);
    });
    return dets;
}

}  // namespace

TEST_CASE("generate_scaled_views") {
    SUBCASE("512x512 at 0.5 and 1.0") {
        const Image img(3, 512, 512, 0.5f);
        const auto views = generate_scaled_views(img, {0.5, 1.0});
        REQUIRE(views.size() == 2);
        CHECK(views[0].view.height() == 256);
        CHECK(views[0].view.width() == 256);
        CHECK(views[1].view.height() == 512);
        CHECK(views[1].view.width() == 512);
    }
    SUBCASE("scale 1.0 is pixel-identical") {
        Image img(3, 16, 16);
        img.planes[0](3, 4) = 0.77f;
        const auto views = generate_scaled_views(img, {1.0});
        CHECK((views[0].view.planes[0] == img.planes[0]).all());
    }
    SUBCASE("dimension rounding at 1.5") {
        const Image img(3, 50, 100);
        const auto views = generate_scaled_views(img, {1.5});
        CHECK(views[0].view.height() == 75);
        CHECK(views[0].view.width() == 150);
    }
    SUBCASE("scales that empty a dimension are rejected") {
        const Image img(3, 2, 2);
        CHECK_THROWS_AS(generate_scaled_views(img, {0.1}), std::invalid_argument);
        CHECK_THROWS_AS(generate_scaled_views(img, {0.0}), std::invalid_argument);
        CHECK_THROWS_AS(generate_scaled_views(img, {-1.0}), std::invalid_argument);
    }
}

TEST_CASE("gd_plus collapses per-scale duplicates of one object") {
    SceneDescription scene;
    scene.width = 128;
    scene.height = 128;
    scene.shapes.push_back({BBox(40, 40, 80, 80), 1, 0.9, false, "", 0});
    MockDetector det(scene);
    const Image img = render_scene(scene, "demo");
    const PromptSet ps = demo_prompts();

    GdPlusConfig cfg;  // scales {0.5, 1.0}, nms 0.1
    GdPlusTrace trace;
    const auto dets = gd_plus(img, ps, det, cfg, &trace);
    REQUIRE(dets.size() == 1);
    CHECK(dets[0].canonical_class == 1);
    CHECK(same_box(dets[0].bbox, BBox(40, 40, 80, 80), 0.75));
    CHECK(trace.raw_total == 2);
    REQUIRE(trace.raw_per_scale.size() == 2);
    CHECK(trace.raw_per_scale[0].first == 0.5);
    CHECK(trace.raw_per_scale[0].second == 1);
    CHECK(trace.post_suppression == 1);
}

TEST_CASE("gd_plus prunes a full-image false positive") {
    SceneDescription scene;
    scene.width = 100;
    scene.height = 100;
    // planted full-image box, mislabeled as class 1; truth is background
    scene.shapes.push_back({BBox(0, 0, 100, 100), 0, 0.95, true, "ground", 1});
    scene.shapes.push_back({BBox(30, 30, 50, 50), 1, 0.9, false, "", 0});
    MockDetector det(scene);
    const Image img = render_scene(scene, "demo");

    GdPlusConfig cfg;
    cfg.max_area_fraction = 0.9;
    const auto dets = gd_plus(img, demo_prompts(), det, cfg);
    REQUIRE(dets.size() == 1);
    CHECK(same_box(dets[0].bbox, BBox(30, 30, 50, 50), 0.75));
}

TEST_CASE("gd_plus canonicalizes raw labels") {
    SceneDescription scene;
    scene.width = 64;
    scene.height = 64;
    scene.shapes.push_back({BBox(10, 10, 40, 40), 1, 0.9, false, "", 0});
    MockDetector det(scene);
    const Image img = render_scene(scene, "demo");

    GdPlusConfig cfg;
    cfg.scales = {1.0};
    const auto dets = gd_plus(img, demo_prompts(), det, cfg);
    REQUIRE(dets.size() == 1);
    CHECK(dets[0].raw_label == "roof");  // first class-1 vocabulary entry
    CHECK(dets[0].canonical_class == 1);
    CHECK(dets[0].source_scale == 1.0);
}

TEST_CASE("gd_plus with one scale and suppression disabled is pass-through") {
    SceneDescription scene;
    scene.width = 96;
    scene.height = 96;
    scene.shapes.push_back({BBox(5, 5, 30, 30), 1, 0.9, false, "", 0});
    scene.shapes.push_back({BBox(40, 40, 90, 90), 2, 0.8, false, "", 0});
    MockDetector det(scene);
    const Image img = render_scene(scene, "demo");
    const PromptSet ps = demo_prompts();

    GdPlusConfig cfg;
    cfg.scales = {1.0};
    cfg.nms_overlap_threshold = 1.0;
    cfg.max_area_fraction = 1.0;
    const auto dets = gd_plus(img, ps, det, cfg);

    const auto raw = det.detect(img, detector_vocabulary(ps));
    REQUIRE(dets.size() == raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        CHECK(dets[i].bbox == raw[i].bbox);
        CHECK(dets[i].raw_label == raw[i].raw_label);
        CHECK(dets[i].canonical_class == *canonicalize(raw[i].raw_label, ps));
    }
}

TEST_CASE("gd_plus output does not depend on the order of scales") {
    SceneDescription scene;
    scene.width = 120;
    scene.height = 120;
    scene.shapes.push_back({BBox(10, 10, 50, 50), 1, 0.9, false, "", 0});
    scene.shapes.push_back({BBox(70, 70, 110, 100), 2, 0.8, false, "", 0});
    MockDetector det(scene);
    const Image img = render_scene(scene, "demo");
    const PromptSet ps = demo_prompts();

    GdPlusConfig fwd;
    fwd.scales = {0.5, 1.0};
    GdPlusConfig rev;
    rev.scales = {1.0, 0.5};
    const auto a = sorted_canonically(gd_plus(img, ps, det, fwd));
    const auto b = sorted_canonically(gd_plus(img, ps, det, rev));
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(same_box(a[i].bbox, b[i].bbox, 1e-9));
        CHECK(a[i].canonical_class == b[i].canonical_class);
    }
}

TEST_CASE("adding a scale never loses a detection when suppression is off") {
    SceneDescription scene;
    scene.width = 120;
    scene.height = 120;
    scene.shapes.push_back({BBox(10, 10, 50, 50), 1, 0.9, false, "", 0});
    scene.shapes.push_back({BBox(70, 70, 110, 100), 2, 0.8, false, "", 0});
    MockDetector det(scene);
    const Image img = render_scene(scene, "demo");
    const PromptSet ps = demo_prompts();

    GdPlusConfig small;
    small.scales = {1.0};
    small.nms_overlap_threshold = 1.0;
    small.max_area_fraction = 1.0;
    GdPlusConfig large = small;
    large.scales = {1.0, 0.5};

    const auto subset = gd_plus(img, ps, det, small);
    const auto superset = gd_plus(img, ps, det, large);
    for (const Detection& d : subset) {
        const bool found = std::any_of(superset.begin(), superset.end(), [&](const Detection& s) {
            return s.canonical_class == d.canonical_class && same_box(s.bbox, d.bbox, 1e-9);
        });
        CHECK(found);
    }
}

TEST_CASE("gd_plus drops detections below min_confidence") {
    SceneDescription scene;
    scene.width = 64;
    scene.height = 64;
    scene.shapes.push_back({BBox(10, 10, 30, 30), 1, 0.4, false, "", 0});
    scene.shapes.push_back({BBox(40, 40, 60, 60), 2, 0.9, false, "", 0});
    MockDetector det(scene);
    const Image img = render_scene(scene, "demo");

    GdPlusConfig cfg;
    cfg.scales = {1.0};
    cfg.min_confidence = 0.5;
    const auto dets = gd_plus(img, demo_prompts(), det, cfg);
    REQUIRE(dets.size() == 1);
    CHECK(dets[0].canonical_class == 2);
}

TEST_CASE("gd_plus output satisfies the Detection invariants") {
    SceneDescription scene;
    scene.width = 100;
    scene.height = 80;
    scene.shapes.push_back({BBox(0, 0, 30, 30), 1, 0.9, false, "", 0});    // touches the corner
    scene.shapes.push_back({BBox(60, 50, 100, 80), 2, 0.8, false, "", 0});  // touches the far edge
    MockDetectorOptions opts;
    opts.duplicates = 3;
    opts.jitter_px = 2.0;
    opts.seed = 3;
    MockDetector det(scene, opts);
    const Image img = render_scene(scene, "demo");

    GdPlusConfig cfg;
    cfg.nms_overlap_threshold = 1.0;  // keep everything, including jittered copies
    cfg.max_area_fraction = 1.0;
    for (const Detection& d : gd_plus(img, demo_prompts(), det, cfg)) {
        CHECK(d.bbox.x_min >= 0.0);
        CHECK(d.bbox.y_min >= 0.0);
        CHECK(d.bbox.x_max <= 100.0);
        CHECK(d.bbox.y_max <= 80.0);
        CHECK(d.confidence >= 0.0);
        CHECK(d.confidence <= 1.0);
        CHECK(d.canonical_class >= 1);
    }
}

TEST_CASE("GdPlusConfig validation and presets") {
    GdPlusConfig cfg;
    cfg.scales = {};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = GdPlusConfig{};
    cfg.nms_overlap_threshold = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = GdPlusConfig{};
    cfg.max_area_fraction = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    CHECK(GdPlusConfig::two_scale_preset().scales == std::vector<double>{0.5, 1.0});
    CHECK(GdPlusConfig::three_scale_preset().scales == std::vector<double>{0.5, 1.0, 1.5});
    CHECK(GdPlusConfig{}.nms_overlap_threshold == 0.1);
    CHECK(GdPlusConfig{}.max_area_fraction == 0.9);
}
