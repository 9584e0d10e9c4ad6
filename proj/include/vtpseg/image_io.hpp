#pragma once

#include "vtpseg/image.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace vtpseg {

// Reads an 8-bit PNG or TIFF. Grayscale and palette images are promoted to
// three channels; alpha is dropped. Intensities come back in [0, 1].
Image read_image(const std::string& path);
Image read_image_png(const std::string& path);
Image read_image_tiff(const std::string& path);

// Writes a 1- or 3-channel image as 8-bit PNG (values clamped to [0, 1]).
void write_image_png(const std::string& path, const Image& img);

// Single-channel 8-bit label maps, value = class id, 0 = background.
Plane<std::uint8_t> read_label_png(const std::string& path);
void write_label_png(const std::string& path, const Plane<std::uint8_t>& labels);

// In-memory PNG codecs used by the HTTP backend wire format.
std::vector<std::uint8_t> encode_png_rgb(const Image& img);
Image decode_png_rgb(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_png_gray(const Plane<std::uint8_t>& labels);
Plane<std::uint8_t> decode_png_gray(const std::vector<std::uint8_t>& bytes);

}  // namespace vtpseg
