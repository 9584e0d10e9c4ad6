#include "vtpseg/scene.hpp"

#include "vtpseg/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace vtpseg {

namespace {
constexpr float kBlueMarker = 200.f / 255.f;
}

bool rect_contains_pixel(const BBox& rect, int x, int y) {
    const double cx = x + 0.5;
    const double cy = y + 0.5;
    return cx >= rect.x_min && cx < rect.x_max && cy >= rect.y_min && cy < rect.y_max;
}

MaskPlane rasterize_rect(const BBox& rect, int height, int width) {
    MaskPlane mask = MaskPlane::Zero(height, width);
    const int r0 = std::max(0, static_cast<int>(std::floor(rect.y_min - 0.5)));
    const int r1 = std::min(height, static_cast<int>(std::ceil(rect.y_max + 0.5)));
    const int c0 = std::max(0, static_cast<int>(std::floor(rect.x_min - 0.5)));
    const int c1 = std::min(width, static_cast<int>(std::ceil(rect.x_max + 0.5)));
    for (int r = r0; r < r1; ++r) {
        for (int c = c0; c < c1; ++c) {
            if (rect_contains_pixel(rect, c, r)) mask(r, c) = 1;
        }
    }
    return mask;
}

std::array<float, 3> shape_fill_color(int shape_index) {
    if (shape_index < 0 || shape_index >= 0xFFFF) {
        throw std::invalid_argument("shape_fill_color: index out of range");
    }
    const int code = shape_index + 1;
    return {static_cast<float>(code & 0xFF) / 255.f,
            static_cast<float>((code >> 8) & 0xFF) / 255.f, kBlueMarker};
}

std::optional<int> shape_index_from_color(float r, float g, float b) {
    const int r8 = static_cast<int>(std::lround(r * 255.f));
    const int g8 = static_cast<int>(std::lround(g * 255.f));
    const int b8 = static_cast<int>(std::lround(b * 255.f));
    if (b8 != 200) return std::nullopt;
    const int code = (g8 << 8) | r8;
    if (code < 1) return std::nullopt;
    return code - 1;
}

Image render_scene(const SceneDescription& scene, const std::string& id) {
    if (scene.width < 1 || scene.height < 1) {
        throw std::invalid_argument("render_scene: scene has no extent");
    }
    Image img(3, scene.height, scene.width, 0.f);
    img.id = id;
    for (std::size_t i = 0; i < scene.shapes.size(); ++i) {
        const std::array<float, 3> color = shape_fill_color(static_cast<int>(i));
        const MaskPlane mask = rasterize_rect(scene.shapes[i].rect, scene.height, scene.width);
        for (int r = 0; r < scene.height; ++r) {
            for (int c = 0; c < scene.width; ++c) {
                if (mask(r, c) == 0) continue;
                img.planes[0](r, c) = color[0];
                img.planes[1](r, c) = color[1];
                img.planes[2](r, c) = color[2];
            }
        }
    }
    return img;
}

LabelMask scene_ground_truth(const SceneDescription& scene, int class_number) {
    LabelMask out(scene.height, scene.width, class_number);
    for (const SceneShape& shape : scene.shapes) {
        const int cls = shape.distractor ? 0 : shape.class_id;
        if (cls < 0 || cls > class_number) {
            throw std::invalid_argument("scene_ground_truth: class id outside [0, class_number]");
        }
        if (cls == 0) continue;  // distractor truth is background
        const MaskPlane mask = rasterize_rect(shape.rect, scene.height, scene.width);
        for (int r = 0; r < scene.height; ++r) {
            for (int c = 0; c < scene.width; ++c) {
                if (mask(r, c) != 0) out.labels(r, c) = static_cast<std::uint8_t>(cls);
            }
        }
    }
    return out;
}

namespace {

nlohmann::json shape_to_json(const SceneShape& s) {
    nlohmann::json j;
    j["rect"] = {s.rect.x_min, s.rect.y_min, s.rect.x_max, s.rect.y_max};
    j["class_id"] = s.class_id;
    j["confidence"] = s.confidence;
    if (s.distractor) {
        j["distractor"] = true;
        j["distractor_label"] = s.distractor_label;
        j["reported_class_id"] = s.reported_class_id;
    }
    return j;
}

SceneShape shape_from_json(const nlohmann::json& j) {
    SceneShape s;
    const auto& r = j.at("rect");
    s.rect = BBox(r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>(),
                  r.at(3).get<double>());
    s.class_id = j.value("class_id", 0);
    s.confidence = j.value("confidence", 1.0);
    s.distractor = j.value("distractor", false);
    s.distractor_label = j.value("distractor_label", std::string{});
    s.reported_class_id = j.value("reported_class_id", 0);
    return s;
}

}  // namespace

SceneMap load_scene_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("scene file not readable: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("scene file " + path + ": " + e.what());
    }
    SceneMap scenes;
    try {
        for (const auto& [stem, js] : j.at("scenes").items()) {
            SceneDescription scene;
            scene.width = js.at("width").get<int>();
            scene.height = js.at("height").get<int>();
            for (const auto& jshape : js.value("shapes", nlohmann::json::array())) {
                scene.shapes.push_back(shape_from_json(jshape));
            }
            scenes.emplace(stem, std::move(scene));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("scene file " + path + ": " + e.what());
    }
    return scenes;
}

void save_scene_file(const std::string& path, const SceneMap& scenes) {
    nlohmann::json j;
    j["scenes"] = nlohmann::json::object();
    for (const auto& [stem, scene] : scenes) {
        nlohmann::json js;
        js["width"] = scene.width;
        js["height"] = scene.height;
        js["shapes"] = nlohmann::json::array();
        for (const SceneShape& s : scene.shapes) js["shapes"].push_back(shape_to_json(s));
        j["scenes"][stem] = std::move(js);
    }
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open for writing");
    out << j.dump(2) << "\n";
}

}  // namespace vtpseg
