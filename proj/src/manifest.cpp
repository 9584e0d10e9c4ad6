#include "vtpseg/manifest.hpp"

#include "vtpseg/errors.hpp"

#include <json.hpp>

#include <fstream>

namespace vtpseg {

namespace {

nlohmann::json detection_to_json(const DetectionRecord& d) {
    nlohmann::json j;
    j["bbox"] = {d.bbox.x_min, d.bbox.y_min, d.bbox.x_max, d.bbox.y_max};
    j["raw_label"] = d.raw_label;
    j["canonical_class"] = d.canonical_class;
    j["confidence"] = d.confidence;
    j["source_scale"] = d.source_scale;
    if (d.filter) {
        nlohmann::json jf;
        jf["kept"] = d.filter->kept;
        jf["argmax"] = d.filter->argmax;
        if (d.filter->matched_class) {
            jf["matched_class"] = *d.filter->matched_class;
        } else {
            jf["matched_class"] = nullptr;
        }
        jf["averaged_probabilities"] = d.filter->averaged_probabilities;
        j["filter"] = std::move(jf);
    }
    return j;
}

DetectionRecord detection_from_json(const nlohmann::json& j) {
    DetectionRecord d;
    const auto& b = j.at("bbox");
    d.bbox = BBox(b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
                  b.at(3).get<double>());
    d.raw_label = j.at("raw_label").get<std::string>();
    d.canonical_class = j.at("canonical_class").get<int>();
    d.confidence = j.at("confidence").get<double>();
    d.source_scale = j.at("source_scale").get<double>();
    if (j.contains("filter")) {
        FilterOutcome f;
        const auto& jf = j.at("filter");
        f.kept = jf.at("kept").get<bool>();
        f.argmax = jf.at("argmax").get<int>();
        if (!jf.at("matched_class").is_null()) f.matched_class = jf.at("matched_class").get<int>();
        f.averaged_probabilities = jf.at("averaged_probabilities").get<std::vector<double>>();
        d.filter = std::move(f);
    }
    return d;
}

}  // namespace

std::string record_to_json_line(const ImageRecord& record) {
    nlohmann::json j;
    j["image"] = record.image;
    j["width"] = record.width;
    j["height"] = record.height;
    j["raw_per_scale"] = nlohmann::json::array();
    for (const auto& [scale, count] : record.raw_per_scale) {
        j["raw_per_scale"].push_back({{"scale", scale}, {"count", count}});
    }
    j["raw_count"] = record.raw_count;
    j["post_nms_count"] = record.post_nms_count;
    j["post_filter_count"] = record.post_filter_count;
    j["empty_mask_count"] = record.empty_mask_count;
    j["elapsed_ms"] = record.elapsed_ms;
    if (record.error) j["error"] = *record.error;
    j["detections"] = nlohmann::json::array();
    for (const DetectionRecord& d : record.detections) {
        j["detections"].push_back(detection_to_json(d));
    }
    return j.dump();
}

void write_manifest(const std::string& path, const std::vector<ImageRecord>& records) {
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open for writing");
    for (const ImageRecord& rec : records) out << record_to_json_line(rec) << "\n";
}

std::vector<ImageRecord> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open for reading");
    std::vector<ImageRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw IoError(path, std::string("bad manifest line: ") + e.what());
        }
        ImageRecord rec;
        rec.image = j.at("image").get<std::string>();
        rec.width = j.at("width").get<int>();
        rec.height = j.at("height").get<int>();
        for (const auto& js : j.at("raw_per_scale")) {
            rec.raw_per_scale.emplace_back(js.at("scale").get<double>(),
                                           js.at("count").get<int>());
        }
        rec.raw_count = j.at("raw_count").get<int>();
        rec.post_nms_count = j.at("post_nms_count").get<int>();
        rec.post_filter_count = j.at("post_filter_count").get<int>();
        rec.empty_mask_count = j.at("empty_mask_count").get<int>();
        rec.elapsed_ms = j.at("elapsed_ms").get<double>();
        if (j.contains("error")) rec.error = j.at("error").get<std::string>();
        for (const auto& jd : j.at("detections")) {
            rec.detections.push_back(detection_from_json(jd));
        }
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace vtpseg
