#pragma once

#include <string>
#include <vector>

namespace fer {

// Single-channel image, row-major, values in [0, 1].
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }
};

// Three-channel image, planar storage, each plane row-major in [0, 1].
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<double> r, g, b;

    RgbImage() = default;
    RgbImage(int w, int h, double fill = 0.0)
        : width(w), height(h),
          r(static_cast<std::size_t>(w) * h, fill),
          g(static_cast<std::size_t>(w) * h, fill),
          b(static_cast<std::size_t>(w) * h, fill) {}

    std::size_t size() const { return r.size(); }
    bool empty() const { return r.empty(); }
};

// Loaded image that may be gray or color.
struct AnyImage {
    bool is_gray = true;
    GrayImage gray;
    RgbImage rgb;
};

// File I/O.  Format is chosen by extension on save (.pgm/.ppm/.png) and by
// file magic on load.  PGM (P5) / PPM (P6) are binary with maxval 255; PNG is
// 8-bit gray or RGB.  8-bit values map to [0,1] by v/255; writing quantizes
// with round(v*255) after clamping.
AnyImage load_image(const std::string& path);
GrayImage load_gray(const std::string& path);   // converts color via to_gray
RgbImage load_rgb(const std::string& path);     // replicates gray into 3 planes
void save_image(const GrayImage& img, const std::string& path);
void save_image(const RgbImage& img, const std::string& path);

// Weighted gray conversion; weights are renormalized by their sum.
GrayImage to_gray(const RgbImage& img,
                  double wr = 0.2989, double wg = 0.5870, double wb = 0.1140);

// Bilinear resize with half-pixel center alignment and edge clamping.
GrayImage resize_bilinear(const GrayImage& img, int out_w, int out_h);
RgbImage resize_bilinear(const RgbImage& img, int out_w, int out_h);

double clamp01(double v);

} // namespace fer
