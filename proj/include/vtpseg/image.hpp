#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace vtpseg {

// Dense raster plane indexed (row, col) = (y, x).
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using PlaneF = Plane<float>;
using MaskPlane = Plane<std::uint8_t>;  // binary 0/1

// Multi-channel raster image, intensities nominally in [0, 1].
// All planes share one height x width.
struct Image {
    std::vector<PlaneF> planes;
    std::string id;  // source stem; carried into backend errors

    Image() = default;
    Image(int channels, int height, int width, float fill = 0.f);

    int channels() const { return static_cast<int>(planes.size()); }
    int height() const { return planes.empty() ? 0 : static_cast<int>(planes[0].rows()); }
    int width() const { return planes.empty() ? 0 : static_cast<int>(planes[0].cols()); }

    float& at(int c, int y, int x) { return planes[static_cast<std::size_t>(c)](y, x); }
    float at(int c, int y, int x) const { return planes[static_cast<std::size_t>(c)](y, x); }

    // True when (x, y) addresses a pixel: 0 <= x < width, 0 <= y < height.
    bool contains_pixel(double x, double y) const;
};

// Bilinear resampling to out_h x out_w, pixel-center alignment.
Image resize_bilinear(const Image& src, int out_h, int out_w);

// Copy of the integer window rows [y0, y1) x cols [x0, x1).
Image crop_window(const Image& src, int x0, int y0, int x1, int y1);

}  // namespace vtpseg
