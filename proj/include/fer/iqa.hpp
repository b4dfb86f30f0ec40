#pragma once

#include "fer/image.hpp"

namespace fer {

// Quality metrics operate on the 8-bit scale: [0,1] data is multiplied by 255
// first, so scores are comparable with the usual published numbers.

// Mean squared error, (255a - 255b)^2 averaged over pixels.
double mse(const GrayImage& a, const GrayImage& b);

// 10*log10(peak^2 / mse); identical images give +infinity.
double psnr(const GrayImage& a, const GrayImage& b, double peak = 255.0);
double psnr_from_mse(double mse_value, double peak = 255.0);

struct SsimResult {
    double mean = 0.0;
    GrayImage map; // per-pixel index over the valid (h-10) x (w-10) interior
};

// Structural similarity with the standard constants: 11x11 Gaussian window
// (sigma 1.5), C1 = (0.01*255)^2, C2 = (0.03*255)^2.  Requires both image
// dimensions >= 11.  ssim(x, x) is exactly 1.
SsimResult ssim(const GrayImage& a, const GrayImage& b);

struct IqaReport {
    double mse = 0.0;
    double psnr = 0.0;
    double ssim = 0.0;
};

IqaReport compare_images(const GrayImage& a, const GrayImage& b);

} // namespace fer
