#include "vtpseg/http_backends.hpp"

#include "vtpseg/image_io.hpp"

#include <httplib.h>
#include <json.hpp>

#include <stdexcept>

namespace vtpseg {

namespace {

constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int b64_value(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
}

// Splits "http://host:port/path" into base and path.
std::pair<std::string, std::string> split_url(const std::string& url) {
    const std::size_t scheme = url.find("://");
    if (scheme == std::string::npos) {
        throw std::invalid_argument("backend url must look like http://host:port/path");
    }
    const std::size_t slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

nlohmann::json post_json(httplib::Client& client, const std::string& path,
                         const nlohmann::json& body, const std::string& backend,
                         const std::string& image_id) {
    const httplib::Result res = client.Post(path, body.dump(), "application/json");
    if (!res) {
        throw BackendError(backend, image_id,
                           "request failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw BackendError(backend, image_id, "HTTP " + std::to_string(res->status) +
                                                  (res->body.empty() ? "" : ": " + res->body));
    }
    try {
        return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(backend, image_id, std::string("malformed response: ") + e.what());
    }
}

std::string image_to_b64(const Image& img) { return base64_encode(encode_png_rgb(img)); }

struct Endpoint {
    httplib::Client client;
    std::string path;

    Endpoint(const std::string& url, int timeout_sec)
        : client(split_url(url).first), path(split_url(url).second) {
        client.set_connection_timeout(timeout_sec);
        client.set_read_timeout(timeout_sec);
        client.set_write_timeout(timeout_sec);
    }
};

}  // namespace

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    for (std::size_t i = 0; i < bytes.size(); i += 3) {
        std::uint32_t chunk = static_cast<std::uint32_t>(bytes[i]) << 16;
        if (i + 1 < bytes.size()) chunk |= static_cast<std::uint32_t>(bytes[i + 1]) << 8;
        if (i + 2 < bytes.size()) chunk |= bytes[i + 2];
        out += kB64Alphabet[(chunk >> 18) & 0x3F];
        out += kB64Alphabet[(chunk >> 12) & 0x3F];
        out += i + 1 < bytes.size() ? kB64Alphabet[(chunk >> 6) & 0x3F] : '=';
        out += i + 2 < bytes.size() ? kB64Alphabet[chunk & 0x3F] : '=';
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    std::uint32_t chunk = 0;
    int bits = 0;
    for (char c : text) {
        if (c == '=' || c == '\n' || c == '\r') continue;
        const int v = b64_value(c);
        if (v < 0) throw std::invalid_argument("base64_decode: invalid character");
        chunk = (chunk << 6) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<std::uint8_t>((chunk >> bits) & 0xFF));
        }
    }
    return out;
}

struct HttpDetector::Impl : Endpoint {
    using Endpoint::Endpoint;
};

HttpDetector::HttpDetector(const std::string& url, int timeout_sec)
    : impl_(std::make_unique<Impl>(url, timeout_sec)) {}

HttpDetector::~HttpDetector() = default;

std::vector<RawDetection> HttpDetector::detect(const Image& img,
                                               const std::vector<VocabEntry>& vocabulary) {
    if (vocabulary.empty()) throw std::invalid_argument("detect: vocabulary must not be empty");
    nlohmann::json body;
    body["image_id"] = img.id;
    body["width"] = img.width();
    body["height"] = img.height();
    body["image_png"] = image_to_b64(img);
    body["vocabulary"] = nlohmann::json::array();
    for (const VocabEntry& v : vocabulary) {
        body["vocabulary"].push_back({{"text", v.text}, {"class_id", v.class_id}});
    }
    const nlohmann::json res = post_json(impl_->client, impl_->path, body, "http-detector", img.id);
    std::vector<RawDetection> out;
    try {
        for (const auto& jd : res.at("detections")) {
            const auto& b = jd.at("bbox");
            RawDetection rd;
            rd.bbox = BBox(b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
                           b.at(3).get<double>());
            rd.raw_label = jd.at("label").get<std::string>();
            rd.confidence = jd.at("confidence").get<double>();
            out.push_back(std::move(rd));
        }
    } catch (const std::exception& e) {
        throw BackendError("http-detector", img.id, std::string("malformed response: ") + e.what());
    }
    return out;
}

struct HttpScorer::Impl : Endpoint {
    using Endpoint::Endpoint;
};

HttpScorer::HttpScorer(const std::string& url, int timeout_sec)
    : impl_(std::make_unique<Impl>(url, timeout_sec)) {}

HttpScorer::~HttpScorer() = default;

Eigen::VectorXd HttpScorer::score(const Image& patch,
                                  const std::vector<std::string>& candidates) {
    if (candidates.empty()) throw std::invalid_argument("score: candidates must not be empty");
    nlohmann::json body;
    body["image_id"] = patch.id;
    body["image_png"] = image_to_b64(patch);
    body["candidates"] = candidates;
    const nlohmann::json res = post_json(impl_->client, impl_->path, body, "http-scorer", patch.id);
    try {
        const auto scores = res.at("scores").get<std::vector<double>>();
        Eigen::VectorXd out(static_cast<Eigen::Index>(scores.size()));
        for (std::size_t i = 0; i < scores.size(); ++i) {
            out[static_cast<Eigen::Index>(i)] = scores[i];
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw BackendError("http-scorer", patch.id, std::string("malformed response: ") + e.what());
    }
}

struct HttpSegmenter::Impl : Endpoint {
    using Endpoint::Endpoint;
};

HttpSegmenter::HttpSegmenter(const std::string& url, int timeout_sec)
    : impl_(std::make_unique<Impl>(url, timeout_sec)) {}

HttpSegmenter::~HttpSegmenter() = default;

MaskPlane HttpSegmenter::segment(const Image& img, Point point) {
    if (!img.contains_pixel(point.x, point.y)) {
        throw std::invalid_argument("segment: point outside image bounds");
    }
    nlohmann::json body;
    body["image_id"] = img.id;
    body["image_png"] = image_to_b64(img);
    body["point"] = {point.x, point.y};
    const nlohmann::json res = post_json(impl_->client, impl_->path, body, "http-segmenter", img.id);
    try {
        const Plane<std::uint8_t> raw =
            decode_png_gray(base64_decode(res.at("mask_png").get<std::string>()));
        return (raw != 0).cast<std::uint8_t>();
    } catch (const BackendError&) {
        throw;
    } catch (const std::exception& e) {
        throw BackendError("http-segmenter", img.id,
                           std::string("malformed response: ") + e.what());
    }
}

}  // namespace vtpseg
