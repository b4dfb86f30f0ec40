#pragma once

#include "fer/image.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace fer {

// Binary mask; 0 = background, 1 = foreground.
struct BinaryImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    BinaryImage() = default;
    BinaryImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }
};

enum class EdgeMethod { sobel, prewitt, roberts, log, zerocross, canny, approxcanny };

// Edge detection.  When `threshold` is absent an automatic one is used:
//  - sobel/prewitt/roberts: 4 * mean gradient magnitude;
//  - log/zerocross: 0.75 * mean |filter response| (slope threshold);
//  - canny/approxcanny: high = 70th percentile of the nonzero gradient
//    magnitudes, low = 0.4 * high; a supplied threshold overrides high.
// canny runs non-maximum suppression plus hysteresis; approxcanny skips the
// hysteresis stage and keeps only strong pixels.
BinaryImage edge(const GrayImage& img, EdgeMethod method,
                 std::optional<double> threshold = std::nullopt);

// v > threshold.
BinaryImage binarize(const GrayImage& img, double threshold = 0.5);

// Structuring element as a set of (dx, dy) offsets.
struct Strel {
    std::vector<std::pair<int, int>> offsets;
};

// Disk of integer radius r: all offsets with dx^2 + dy^2 <= r^2.
Strel disk_strel(int r);
// Full kw x kh rectangle centred on the origin (even sizes extend right/down).
Strel rect_strel(int kw, int kh);

// Gray-scale morphology.  Out-of-bounds samples read 1.0 for erosion and 0.0
// for dilation.  Structuring elements are used as given (no reflection).
GrayImage erode(const GrayImage& img, const Strel& se);
GrayImage dilate(const GrayImage& img, const Strel& se);
GrayImage morph_open(const GrayImage& img, const Strel& se);   // dilate(erode(img))
GrayImage morph_close(const GrayImage& img, const Strel& se);  // erode(dilate(img))
GrayImage tophat(const GrayImage& img, const Strel& se);       // clamp01(img - open)
GrayImage bothat(const GrayImage& img, const Strel& se);       // clamp01(close - img)

// Fills background regions not connected (4-connectivity) to the border.
BinaryImage fill_holes(const BinaryImage& img);

} // namespace fer
