#include "vtpseg/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vtpseg {

Image::Image(int channels, int height, int width, float fill) {
    if (channels < 1 || height < 1 || width < 1) {
        throw std::invalid_argument("Image: channels, height and width must be >= 1");
    }
    planes.assign(static_cast<std::size_t>(channels), PlaneF::Constant(height, width, fill));
}

bool Image::contains_pixel(double x, double y) const {
    return x >= 0.0 && y >= 0.0 && x < static_cast<double>(width()) &&
           y < static_cast<double>(height());
}

Image resize_bilinear(const Image& src, int out_h, int out_w) {
    if (src.channels() < 1) throw std::invalid_argument("resize_bilinear: empty image");
    if (out_h < 1 || out_w < 1) {
        throw std::invalid_argument("resize_bilinear: output dimensions must be >= 1");
    }
    const int in_h = src.height();
    const int in_w = src.width();
    Image dst(src.channels(), out_h, out_w);
    dst.id = src.id;

    const double ry = static_cast<double>(in_h) / out_h;
    const double rx = static_cast<double>(in_w) / out_w;
    for (int c = 0; c < src.channels(); ++c) {
        const PlaneF& in = src.planes[static_cast<std::size_t>(c)];
        PlaneF& out = dst.planes[static_cast<std::size_t>(c)];
        for (int r = 0; r < out_h; ++r) {
            double sy = (r + 0.5) * ry - 0.5;
            sy = std::clamp(sy, 0.0, static_cast<double>(in_h - 1));
            const int y0 = static_cast<int>(sy);
            const int y1 = std::min(y0 + 1, in_h - 1);
            const float fy = static_cast<float>(sy - y0);
            for (int col = 0; col < out_w; ++col) {
                double sx = (col + 0.5) * rx - 0.5;
                sx = std::clamp(sx, 0.0, static_cast<double>(in_w - 1));
                const int x0 = static_cast<int>(sx);
                const int x1 = std::min(x0 + 1, in_w - 1);
                const float fx = static_cast<float>(sx - x0);
                const float top = in(y0, x0) * (1.f - fx) + in(y0, x1) * fx;
                const float bot = in(y1, x0) * (1.f - fx) + in(y1, x1) * fx;
                out(r, col) = top * (1.f - fy) + bot * fy;
            }
        }
    }
    return dst;
}

Image crop_window(const Image& src, int x0, int y0, int x1, int y1) {
    if (x0 < 0 || y0 < 0 || x1 > src.width() || y1 > src.height() || x0 >= x1 || y0 >= y1) {
        throw std::invalid_argument("crop_window: window outside image or empty");
    }
    Image dst(src.channels(), y1 - y0, x1 - x0);
    dst.id = src.id;
    for (int c = 0; c < src.channels(); ++c) {
        dst.planes[static_cast<std::size_t>(c)] =
            src.planes[static_cast<std::size_t>(c)].block(y0, x0, y1 - y0, x1 - x0);
    }
    return dst;
}

}  // namespace vtpseg
