#include "vtpseg/image_io.hpp"

#include "vtpseg/errors.hpp"

#include <png.h>
#include <tiffio.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>

namespace vtpseg {

namespace {

std::string lower_ext(const std::string& path) {
    std::string ext = std::filesystem::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

std::uint8_t quantize(float v) {
    const float clamped = std::clamp(v, 0.f, 1.f);
    return static_cast<std::uint8_t>(std::lround(clamped * 255.f));
}

Image planes_from_rgb8(const std::uint8_t* data, int height, int width) {
    Image img(3, height, width);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const std::uint8_t* px = data + (static_cast<std::size_t>(r) * width + c) * 3;
            img.planes[0](r, c) = px[0] / 255.f;
            img.planes[1](r, c) = px[1] / 255.f;
            img.planes[2](r, c) = px[2] / 255.f;
        }
    }
    return img;
}

std::vector<std::uint8_t> rgb8_from_planes(const Image& img) {
    const int h = img.height();
    const int w = img.width();
    std::vector<std::uint8_t> data(static_cast<std::size_t>(h) * w * 3);
    const bool gray = img.channels() == 1;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            std::uint8_t* px = data.data() + (static_cast<std::size_t>(r) * w + c) * 3;
            px[0] = quantize(img.at(0, r, c));
            px[1] = quantize(img.at(gray ? 0 : 1, r, c));
            px[2] = quantize(img.at(gray ? 0 : 2, r, c));
        }
    }
    return data;
}

Image finish_read_rgb(png_image& png, const std::string& origin) {
    png.format = PNG_FORMAT_RGB;
    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr)) {
        std::string msg = png.message;
        png_image_free(&png);
        throw IoError(origin, "PNG decode failed: " + msg);
    }
    return planes_from_rgb8(buffer.data(), static_cast<int>(png.height),
                            static_cast<int>(png.width));
}

Plane<std::uint8_t> finish_read_gray(png_image& png, const std::string& origin) {
    if (png.format & PNG_FORMAT_FLAG_COLOR) {
        png_image_free(&png);
        throw IoError(origin, "label maps must be single-channel PNG");
    }
    png.format = PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr)) {
        std::string msg = png.message;
        png_image_free(&png);
        throw IoError(origin, "PNG decode failed: " + msg);
    }
    const int h = static_cast<int>(png.height);
    const int w = static_cast<int>(png.width);
    Plane<std::uint8_t> labels(h, w);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            labels(r, c) = buffer[static_cast<std::size_t>(r) * w + c];
        }
    }
    return labels;
}

}  // namespace

Image read_image(const std::string& path) {
    const std::string ext = lower_ext(path);
    if (ext == ".png") return read_image_png(path);
    if (ext == ".tif" || ext == ".tiff") return read_image_tiff(path);
    throw IoError(path, "unsupported image format (expected .png, .tif or .tiff)");
}

Image read_image_png(const std::string& path) {
    png_image png;
    std::memset(&png, 0, sizeof png);
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&png, path.c_str())) {
        throw IoError(path, std::string("cannot read PNG: ") + png.message);
    }
    Image img = finish_read_rgb(png, path);
    img.id = std::filesystem::path(path).stem().string();
    return img;
}

Image read_image_tiff(const std::string& path) {
    TIFFSetWarningHandler(nullptr);
    TIFF* tif = TIFFOpen(path.c_str(), "r");
    if (!tif) throw IoError(path, "cannot open TIFF");
    std::uint32_t w = 0;
    std::uint32_t h = 0;
    TIFFGetField(tif, TIFFTAG_IMAGEWIDTH, &w);
    TIFFGetField(tif, TIFFTAG_IMAGELENGTH, &h);
    if (w == 0 || h == 0) {
        TIFFClose(tif);
        throw IoError(path, "TIFF has no extent");
    }
    std::vector<std::uint32_t> raster(static_cast<std::size_t>(w) * h);
    const int ok = TIFFReadRGBAImageOriented(tif, w, h, raster.data(), ORIENTATION_TOPLEFT, 0);
    TIFFClose(tif);
    if (!ok) throw IoError(path, "TIFF decode failed");

    Image img(3, static_cast<int>(h), static_cast<int>(w));
    img.id = std::filesystem::path(path).stem().string();
    for (std::uint32_t r = 0; r < h; ++r) {
        for (std::uint32_t c = 0; c < w; ++c) {
            const std::uint32_t px = raster[static_cast<std::size_t>(r) * w + c];
            img.planes[0](r, c) = TIFFGetR(px) / 255.f;
            img.planes[1](r, c) = TIFFGetG(px) / 255.f;
            img.planes[2](r, c) = TIFFGetB(px) / 255.f;
        }
    }
    return img;
}

void write_image_png(const std::string& path, const Image& img) {
    if (img.channels() != 1 && img.channels() != 3) {
        throw IoError(path, "write_image_png expects 1 or 3 channels");
    }
    const std::vector<std::uint8_t> data = rgb8_from_planes(img);
    png_image png;
    std::memset(&png, 0, sizeof png);
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(img.width());
    png.height = static_cast<png_uint_32>(img.height());
    png.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&png, path.c_str(), 0, data.data(), 0, nullptr)) {
        throw IoError(path, std::string("PNG encode failed: ") + png.message);
    }
}

Plane<std::uint8_t> read_label_png(const std::string& path) {
    png_image png;
    std::memset(&png, 0, sizeof png);
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&png, path.c_str())) {
        throw IoError(path, std::string("cannot read PNG: ") + png.message);
    }
    return finish_read_gray(png, path);
}

void write_label_png(const std::string& path, const Plane<std::uint8_t>& labels) {
    const int h = static_cast<int>(labels.rows());
    const int w = static_cast<int>(labels.cols());
    if (h < 1 || w < 1) throw IoError(path, "label map has no extent");
    std::vector<std::uint8_t> data(static_cast<std::size_t>(h) * w);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            data[static_cast<std::size_t>(r) * w + c] = labels(r, c);
        }
    }
    png_image png;
    std::memset(&png, 0, sizeof png);
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(w);
    png.height = static_cast<png_uint_32>(h);
    png.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&png, path.c_str(), 0, data.data(), 0, nullptr)) {
        throw IoError(path, std::string("PNG encode failed: ") + png.message);
    }
}

std::vector<std::uint8_t> encode_png_rgb(const Image& img) {
    if (img.channels() != 1 && img.channels() != 3) {
        throw std::invalid_argument("encode_png_rgb expects 1 or 3 channels");
    }
    const std::vector<std::uint8_t> data = rgb8_from_planes(img);
    png_image png;
    std::memset(&png, 0, sizeof png);
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(img.width());
    png.height = static_cast<png_uint_32>(img.height());
    png.format = PNG_FORMAT_RGB;

    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&png, nullptr, &size, 0, data.data(), 0, nullptr)) {
        throw IoError("<memory>", std::string("PNG encode failed: ") + png.message);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&png, out.data(), &size, 0, data.data(), 0, nullptr)) {
        throw IoError("<memory>", std::string("PNG encode failed: ") + png.message);
    }
    out.resize(size);
    return out;
}

Image decode_png_rgb(const std::vector<std::uint8_t>& bytes) {
    png_image png;
    std::memset(&png, 0, sizeof png);
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
        throw IoError("<memory>", std::string("cannot read PNG: ") + png.message);
    }
    return finish_read_rgb(png, "<memory>");
}

std::vector<std::uint8_t> encode_png_gray(const Plane<std::uint8_t>& labels) {
    const int h = static_cast<int>(labels.rows());
    const int w = static_cast<int>(labels.cols());
    if (h < 1 || w < 1) throw std::invalid_argument("encode_png_gray: empty plane");
    std::vector<std::uint8_t> data(static_cast<std::size_t>(h) * w);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            data[static_cast<std::size_t>(r) * w + c] = labels(r, c);
        }
    }
    png_image png;
    std::memset(&png, 0, sizeof png);
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(w);
    png.height = static_cast<png_uint_32>(h);
    png.format = PNG_FORMAT_GRAY;

    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&png, nullptr, &size, 0, data.data(), 0, nullptr)) {
        throw IoError("<memory>", std::string("PNG encode failed: ") + png.message);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&png, out.data(), &size, 0, data.data(), 0, nullptr)) {
        throw IoError("<memory>", std::string("PNG encode failed: ") + png.message);
    }
    out.resize(size);
    return out;
}

Plane<std::uint8_t> decode_png_gray(const std::vector<std::uint8_t>& bytes) {
    png_image png;
    std::memset(&png, 0, sizeof png);
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
        throw IoError("<memory>", std::string("cannot read PNG: ") + png.message);
    }
    return finish_read_gray(png, "<memory>");
}

}  // namespace vtpseg
