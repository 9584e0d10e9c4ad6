#include "vtpseg/mock_backends.hpp"
#include "vtpseg/segmentation.hpp"

#include <doctest.h>

#include <algorithm>

using namespace vtpseg;

namespace {

// Records every prompt it receives before delegating.
struct RecordingSegmenter : PointSegmenter {
    PointSegmenter& inner;
    std::vector<Point> prompts;
    explicit RecordingSegmenter(PointSegmenter& s) : inner(s) {}
    MaskPlane segment(const Image& img, Point p) override {
        prompts.push_back(p);
        return inner.segment(img, p);
    }
};

struct ThrowingSegmenter : PointSegmenter {
    MaskPlane segment(const Image& img, Point) override {
        throw BackendError("stub-segmenter", img.id, "boom");
    }
};

InstanceMask make_instance(const MaskPlane& mask, int cls, double conf, int index) {
    InstanceMask inst;
    inst.mask = mask;
    inst.detection.bbox = BBox(0, 0, 1, 1);
    inst.detection.canonical_class = cls;
    inst.detection.confidence = conf;
    inst.detection_index = index;
    inst.is_empty = !(mask != 0).any();
    return inst;
}

}  // namespace

TEST_CASE("prompt_point rounding and clamping") {
    // centroid (5.5, 5.5) rounds half away from zero
    const Point p = prompt_point(BBox(1, 1, 10, 10), 64, 64);
    CHECK(p.x == 6.0);
    CHECK(p.y == 6.0);

    const Point q = prompt_point(BBox(0, 0, 3, 5), 64, 64);
    CHECK(q.x == 2.0);  // 1.5 -> 2
    CHECK(q.y == 3.0);  // 2.5 -> 3

    // centroid 63.5 rounds to 64, clamped onto the pixel grid
    const Point r = prompt_point(BBox(63, 60, 64, 64), 64, 64);
    CHECK(r.x == 63.0);
}

TEST_CASE("segment_all") {
    SceneDescription scene;
    scene.width = 64;
    scene.height = 64;
    scene.shapes.push_back({BBox(10, 10, 30, 30), 1, 0.9, false, "", 0});
    scene.shapes.push_back({BBox(40, 10, 60, 26), 2, 0.8, false, "", 0});
    scene.shapes.push_back({BBox(10, 40, 26, 60), 1, 0.7, false, "", 0});
    const Image img = render_scene(scene, "demo");
    MockSegmenter seg(scene);

    SUBCASE("zero detections give an empty list") {
        CHECK(segment_all(img, {}, seg).empty());
    }
    SUBCASE("one detection yields the exact shape mask") {
        const std::vector<Detection> dets{{scene.shapes[0].rect, "a", 1, 0.9, 1.0}};
        const auto instances = segment_all(img, dets, seg);
        REQUIRE(instances.size() == 1);
        CHECK((instances[0].mask == rasterize_rect(scene.shapes[0].rect, 64, 64)).all());
        CHECK(!instances[0].is_empty);
        CHECK(instances[0].detection_index == 0);
    }
    SUBCASE("exactly one segmenter call per detection, in order") {
        RecordingSegmenter rec(seg);
        std::vector<Detection> dets;
        for (const SceneShape& s : scene.shapes) {
            dets.push_back({s.rect, "x", std::max(1, s.class_id), s.confidence, 1.0});
        }
        const auto instances = segment_all(img, dets, rec);
        REQUIRE(rec.prompts.size() == 3);
        CHECK(instances.size() == 3);
        for (std::size_t i = 0; i < dets.size(); ++i) {
            const Point expected = prompt_point(dets[i].bbox, 64, 64);
            CHECK(rec.prompts[i].x == expected.x);
            CHECK(rec.prompts[i].y == expected.y);
        }
    }
    SUBCASE("empty masks are retained and flagged") {
        // a box over background only
        const std::vector<Detection> dets{{BBox(32, 32, 38, 38), "a", 1, 0.9, 1.0}};
        const auto instances = segment_all(img, dets, seg);
        REQUIRE(instances.size() == 1);
        CHECK(instances[0].is_empty);
        CHECK(instances[0].mask.cast<int>().sum() == 0);
    }
    SUBCASE("boxes outside the image are a precondition error") {
        const std::vector<Detection> dets{{BBox(50, 50, 70, 70), "a", 1, 0.9, 1.0}};
        CHECK_THROWS_AS(segment_all(img, dets, seg), std::invalid_argument);
    }
    SUBCASE("backend failures carry the detection identity") {
        ThrowingSegmenter bad;
        const std::vector<Detection> dets{{scene.shapes[0].rect, "a", 1, 0.9, 1.0}};
        try {
            segment_all(img, dets, bad);
            FAIL("expected BackendError");
        } catch (const BackendError& e) {
            CHECK(e.image_id() == "demo");
            CHECK(std::string(e.what()).find("detection #0") != std::string::npos);
        }
    }
}

TEST_CASE("assemble_label_mask") {
    SUBCASE("no instances give all background") {
        const LabelMask out = assemble_label_mask({}, 8, 8, 3);
        CHECK((out.labels == 0).all());
        CHECK(out.class_number == 3);
    }
    SUBCASE("disjoint instances paint their classes") {
        MaskPlane a = rasterize_rect(BBox(0, 0, 4, 4), 8, 8);
        MaskPlane b = rasterize_rect(BBox(4, 4, 8, 8), 8, 8);
        const LabelMask out = assemble_label_mask(
            {make_instance(a, 1, 0.9, 0), make_instance(b, 2, 0.8, 1)}, 8, 8, 2);
        CHECK(out.labels(1, 1) == 1);
        CHECK(out.labels(5, 5) == 2);
        CHECK(out.labels(1, 5) == 0);
        CHECK(static_cast<int>(out.labels.cast<int>().sum()) == 16 * 1 + 16 * 2);
    }
    SUBCASE("overlap goes to the higher confidence") {
        MaskPlane a = rasterize_rect(BBox(0, 0, 6, 6), 8, 8);
        MaskPlane b = rasterize_rect(BBox(2, 2, 8, 8), 8, 8);
        const LabelMask out = assemble_label_mask(
            {make_instance(a, 1, 0.9, 0), make_instance(b, 2, 0.7, 1)}, 8, 8, 2);
        CHECK(out.labels(3, 3) == 1);  // overlap pixel
        CHECK(out.labels(7, 7) == 2);
    }
    SUBCASE("confidence tie goes to the earlier detection index") {
        MaskPlane a = rasterize_rect(BBox(0, 0, 8, 8), 8, 8);
        const LabelMask out = assemble_label_mask(
            {make_instance(a, 2, 0.8, 1), make_instance(a, 1, 0.8, 0)}, 8, 8, 2);
        CHECK((out.labels == 1).all());
    }
    SUBCASE("result does not depend on input order") {
        MaskPlane a = rasterize_rect(BBox(0, 0, 6, 6), 8, 8);
        MaskPlane b = rasterize_rect(BBox(2, 2, 8, 8), 8, 8);
        MaskPlane c = rasterize_rect(BBox(1, 1, 7, 7), 8, 8);
        std::vector<InstanceMask> instances{make_instance(a, 1, 0.9, 0),
                                            make_instance(b, 2, 0.7, 1),
                                            make_instance(c, 1, 0.9, 2)};
        const LabelMask fwd = assemble_label_mask(instances, 8, 8, 2);
        std::reverse(instances.begin(), instances.end());
        const LabelMask rev = assemble_label_mask(instances, 8, 8, 2);
        CHECK((fwd.labels == rev.labels).all());
    }
    SUBCASE("non-zero pixels are covered by some input mask") {
        MaskPlane a = rasterize_rect(BBox(1, 1, 5, 5), 8, 8);
        MaskPlane b = rasterize_rect(BBox(3, 3, 7, 7), 8, 8);
        const LabelMask out = assemble_label_mask(
            {make_instance(a, 1, 0.5, 0), make_instance(b, 2, 0.6, 1)}, 8, 8, 2);
        for (int r = 0; r < 8; ++r) {
            for (int col = 0; col < 8; ++col) {
                if (out.labels(r, col) != 0) CHECK((a(r, col) != 0 || b(r, col) != 0));
            }
        }
        // per-class pixel count never exceeds the instance mask total
        CHECK((out.labels == 1).count() <= a.cast<int>().sum());
        CHECK((out.labels == 2).count() <= b.cast<int>().sum());
    }
    SUBCASE("class id beyond class_number rejected") {
        MaskPlane a = rasterize_rect(BBox(0, 0, 4, 4), 8, 8);
        CHECK_THROWS_AS(assemble_label_mask({make_instance(a, 3, 0.9, 0)}, 8, 8, 2),
                        std::invalid_argument);
    }
    SUBCASE("mask extent mismatch rejected") {
        MaskPlane small = MaskPlane::Zero(4, 4);
        small(1, 1) = 1;
        CHECK_THROWS_AS(assemble_label_mask({make_instance(small, 1, 0.9, 0)}, 8, 8, 2),
                        std::invalid_argument);
    }
}

TEST_CASE("LabelMask validation") {
    CHECK_THROWS_AS(LabelMask(0, 4, 2), std::invalid_argument);
    CHECK_THROWS_AS(LabelMask(4, 4, 300), std::invalid_argument);
    CHECK_THROWS_AS(LabelMask(4, 4, -1), std::invalid_argument);

    Plane<std::uint8_t> plane = Plane<std::uint8_t>::Zero(4, 4);
    plane(2, 2) = 5;
    CHECK_THROWS_AS(LabelMask(plane, 4), std::invalid_argument);
    const LabelMask ok(plane, 5);
    CHECK(ok.labels(2, 2) == 5);
    CHECK(ok.height() == 4);
}
