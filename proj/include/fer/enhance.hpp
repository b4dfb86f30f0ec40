#pragma once

#include "fer/image.hpp"

#include <array>
#include <cstdint>

namespace fer {

// 256-bin intensity histogram; bin k counts pixels with floor(v*255 + 0.5) == k.
std::array<long, 256> histogram256(const GrayImage& img);

// Percentile contrast stretch: the [low_pct, high_pct] intensity percentiles
// (order statistics with linear interpolation) map to [0, 1], clamped.
// A flat image is returned unchanged.
GrayImage adjust_contrast(const GrayImage& img, double low_pct = 0.01, double high_pct = 0.99);

// Linear window stretch: [lo, hi] maps to [0, 1], clamped.  Degenerate
// windows (hi <= lo) return the input unchanged.
GrayImage stretch_window(const GrayImage& img, double lo, double hi);

// Histogram equalization: out = (cdf(v) - cdf_min) / (1 - cdf_min), quantized
// to 256 levels.  A constant image is returned unchanged.
GrayImage equalize_hist(const GrayImage& img);

// Median filter with zero padding.  Window counts include padded zeros; an
// even sample count takes the lower of the two middle values.
GrayImage median_filter(const GrayImage& img, int kw, int kh);

// Separable Gaussian blur; kernel half-width ceil(3*sigma), normalized to sum
// 1, replicate-padded borders.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

// out = clamp(img + amount * (img - gaussian_blur(img, sigma))).
GrayImage unsharp_mask(const GrayImage& img, double sigma = 1.0, double amount = 1.0);

// Adaptive (Wiener-style) denoising: with local mean m and variance s2 over a
// kw x kh zero-padded window and nu = mean of all local variances,
// out = m + max(0, s2 - nu) / max(s2, nu) * (in - m).
GrayImage wiener_adaptive(const GrayImage& img, int kw = 3, int kh = 3);

// Local standard deviation (n-1 denominator) over a replicate-padded window.
GrayImage std_filter(const GrayImage& img, int kw = 3, int kh = 3);

enum class GradientKernel { sobel, prewitt };

struct GradientField {
    GrayImage magnitude;      // sqrt(gx^2 + gy^2); not confined to [0,1]
    GrayImage direction_deg;  // atan2(-gy, gx) in degrees, range (-180, 180]
};

// Image gradient with replicate padding.
GradientField gradient(const GrayImage& img, GradientKernel kernel = GradientKernel::sobel);

enum class NoiseModel { gaussian, salt_pepper, poisson, speckle };

struct NoiseParams {
    double mean = 0.0;      // gaussian
    double variance = 0.01; // gaussian (0.01) / speckle (0.05)
    double density = 0.05;  // salt_pepper
};

// Deterministic noise injection; one pixel consumes one RNG draw, row-major.
GrayImage add_noise(const GrayImage& img, NoiseModel model, const NoiseParams& params,
                    std::uint64_t seed);

// Replaces pixels darker than `threshold` with `replacement` (depth-map hole
// filling; defaults are the 8-bit levels 30 and 70).
GrayImage repair_black_spots(const GrayImage& img, double threshold = 30.0 / 255.0,
                             double replacement = 70.0 / 255.0);

} // namespace fer
