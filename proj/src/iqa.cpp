#include "fer/iqa.hpp"

#include "fer/error.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace fer {

namespace {

void require_same_shape(const GrayImage& a, const GrayImage& b) {
    if (a.empty() || b.empty()) throw ShapeError("quality metrics require non-empty images");
    if (a.width != b.width || a.height != b.height) {
        throw ShapeError("quality metrics require images of identical size");
    }
}

} // namespace

double mse(const GrayImage& a, const GrayImage& b) {
    require_same_shape(a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = 255.0 * a.data[i] - 255.0 * b.data[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

double psnr_from_mse(double mse_value, double peak) {
    if (mse_value < 0.0) throw InvalidArgument("mse must be >= 0");
    if (mse_value == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse_value);
}

double psnr(const GrayImage& a, const GrayImage& b, double peak) {
    return psnr_from_mse(mse(a, b), peak);
}

SsimResult ssim(const GrayImage& a, const GrayImage& b) {
    require_same_shape(a, b);
    constexpr int K = 11;
    constexpr double SIGMA = 1.5;
    if (a.width < K || a.height < K) {
        throw ShapeError("ssim requires both dimensions >= 11");
    }
    const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    const double c2 = (0.03 * 255.0) * (0.03 * 255.0);

    // Normalized 11x11 Gaussian window.
    double win[K][K];
    double wsum = 0.0;
    for (int y = 0; y < K; ++y) {
        for (int x = 0; x < K; ++x) {
            const double dx = x - (K - 1) / 2.0, dy = y - (K - 1) / 2.0;
            win[y][x] = std::exp(-(dx * dx + dy * dy) / (2.0 * SIGMA * SIGMA));
            wsum += win[y][x];
        }
    }
    for (int y = 0; y < K; ++y) {
        for (int x = 0; x < K; ++x) win[y][x] /= wsum;
    }

    SsimResult res;
    res.map = GrayImage(a.width - K + 1, a.height - K + 1);
    double total = 0.0;
    for (int oy = 0; oy + K <= a.height; ++oy) {
        for (int ox = 0; ox + K <= a.width; ++ox) {
            double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
            for (int y = 0; y < K; ++y) {
                for (int x = 0; x < K; ++x) {
                    const double w = win[y][x];
                    const double va = 255.0 * a.at(ox + x, oy + y);
                    const double vb = 255.0 * b.at(ox + x, oy + y);
                    mx += w * va;
                    my += w * vb;
                    sxx += w * va * va;
                    syy += w * vb * vb;
                    sxy += w * va * vb;
                }
            }
            const double vx = sxx - mx * mx;
            const double vy = syy - my * my;
            const double cxy = sxy - mx * my;
            const double num = (2.0 * mx * my + c1) * (2.0 * cxy + c2);
            const double den = (mx * mx + my * my + c1) * (vx + vy + c2);
            const double v = num / den;
            res.map.at(ox, oy) = v;
            total += v;
        }
    }
    res.mean = total / static_cast<double>(res.map.size());
    return res;
}

IqaReport compare_images(const GrayImage& a, const GrayImage& b) {
    IqaReport rep;
    rep.mse = mse(a, b);
    rep.psnr = psnr_from_mse(rep.mse);
    rep.ssim = ssim(a, b).mean;
    return rep;
}

} // namespace fer
