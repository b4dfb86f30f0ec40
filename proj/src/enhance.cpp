#include "fer/enhance.hpp"

#include "fer/error.hpp"
#include "fer/rng.hpp"

#include <algorithm>
#include <cmath>

namespace fer {

namespace {

void require_nonempty(const GrayImage& img) {
    if (img.empty()) throw ShapeError("operation requires a non-empty image");
}

void require_odd_window(int kw, int kh) {
    if (kw <= 0 || kh <= 0 || kw % 2 == 0 || kh % 2 == 0) {
        throw InvalidArgument("window size must be odd and positive");
    }
}

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

// Percentile with linear interpolation between order statistics.
double percentile(const std::vector<double>& sorted, double p) {
    const double idx = p * (static_cast<double>(sorted.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = idx - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

} // namespace

std::array<long, 256> histogram256(const GrayImage& img) {
    require_nonempty(img);
    std::array<long, 256> hist{};
    for (double v : img.data) {
        int bin = static_cast<int>(std::floor(clamp01(v) * 255.0 + 0.5));
        hist[clampi(bin, 0, 255)]++;
    }
    return hist;
}

GrayImage adjust_contrast(const GrayImage& img, double low_pct, double high_pct) {
    require_nonempty(img);
    if (!(low_pct >= 0.0 && high_pct <= 1.0 && low_pct < high_pct)) {
        throw InvalidArgument("contrast percentiles must satisfy 0 <= low < high <= 1");
    }
    std::vector<double> sorted = img.data;
    std::sort(sorted.begin(), sorted.end());
    const double lo = percentile(sorted, low_pct);
    const double hi = percentile(sorted, high_pct);
    return stretch_window(img, lo, hi);
}

GrayImage stretch_window(const GrayImage& img, double lo, double hi) {
    require_nonempty(img);
    if (!(hi > lo)) return img;
    GrayImage out(img.width, img.height);
    const double scale = 1.0 / (hi - lo);
    for (std::size_t i = 0; i < img.size(); ++i) {
        out.data[i] = clamp01((img.data[i] - lo) * scale);
    }
    return out;
}

GrayImage equalize_hist(const GrayImage& img) {
    require_nonempty(img);
    const std::array<long, 256> hist = histogram256(img);
    const double total = static_cast<double>(img.size());

    std::array<double, 256> cdf{};
    double acc = 0.0;
    double cdf_min = 1.0;
    bool seen = false;
    for (int k = 0; k < 256; ++k) {
        acc += static_cast<double>(hist[k]);
        cdf[k] = acc / total;
        if (!seen && hist[k] > 0) {
            cdf_min = cdf[k];
            seen = true;
        }
    }
    if (cdf_min >= 1.0) return img; // constant image

    GrayImage out(img.width, img.height);
    const double denom = 1.0 - cdf_min;
    for (std::size_t i = 0; i < img.size(); ++i) {
        const int bin = clampi(static_cast<int>(std::floor(clamp01(img.data[i]) * 255.0 + 0.5)), 0, 255);
        const double q = (cdf[bin] - cdf_min) / denom;
        out.data[i] = std::floor(q * 255.0 + 0.5) / 255.0;
    }
    return out;
}

GrayImage median_filter(const GrayImage& img, int kw, int kh) {
    require_nonempty(img);
    if (kw <= 0 || kh <= 0) throw InvalidArgument("median window must be positive");
    const int rx0 = (kw - 1) / 2, rx1 = kw / 2;
    const int ry0 = (kh - 1) / 2, ry1 = kh / 2;
    GrayImage out(img.width, img.height);
    std::vector<double> window(static_cast<std::size_t>(kw) * kh);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            std::size_t n = 0;
            for (int dy = -ry0; dy <= ry1; ++dy) {
                for (int dx = -rx0; dx <= rx1; ++dx) {
                    const int sx = x + dx, sy = y + dy;
                    const bool inside = sx >= 0 && sx < img.width && sy >= 0 && sy < img.height;
                    window[n++] = inside ? img.at(sx, sy) : 0.0; // zero padding
                }
            }
            // lower middle breaks even-count ties
            const std::size_t mid = (n - 1) / 2;
            std::nth_element(window.begin(), window.begin() + mid, window.begin() + n);
            out.at(x, y) = window[mid];
        }
    }
    return out;
}

namespace {

std::vector<double> gaussian_kernel(double sigma) {
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * r + 1);
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        k[i + r] = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        sum += k[i + r];
    }
    for (double& v : k) v /= sum;
    return k;
}

// 1-D convolution along rows or columns with replicate padding.
GrayImage conv_separable(const GrayImage& img, const std::vector<double>& k, bool horizontal) {
    const int r = static_cast<int>(k.size() / 2);
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int d = -r; d <= r; ++d) {
                const int sx = horizontal ? clampi(x + d, 0, img.width - 1) : x;
                const int sy = horizontal ? y : clampi(y + d, 0, img.height - 1);
                acc += k[d + r] * img.at(sx, sy);
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

} // namespace

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    require_nonempty(img);
    if (!(sigma > 0.0)) throw InvalidArgument("gaussian sigma must be positive");
    const std::vector<double> k = gaussian_kernel(sigma);
    return conv_separable(conv_separable(img, k, true), k, false);
}

GrayImage unsharp_mask(const GrayImage& img, double sigma, double amount) {
    const GrayImage blurred = gaussian_blur(img, sigma);
    GrayImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.size(); ++i) {
        out.data[i] = clamp01(img.data[i] + amount * (img.data[i] - blurred.data[i]));
    }
    return out;
}

GrayImage wiener_adaptive(const GrayImage& img, int kw, int kh) {
    require_nonempty(img);
    require_odd_window(kw, kh);
    const int rx = kw / 2, ry = kh / 2;
    const double count = static_cast<double>(kw) * kh;
    const std::size_t n = img.size();

    std::vector<double> mean(n), var(n);
    double nu = 0.0;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double s = 0.0, s2 = 0.0;
            for (int dy = -ry; dy <= ry; ++dy) {
                for (int dx = -rx; dx <= rx; ++dx) {
                    const int sx = x + dx, sy = y + dy;
                    if (sx < 0 || sx >= img.width || sy < 0 || sy >= img.height) continue;
                    const double v = img.at(sx, sy); // zero padding contributes nothing
                    s += v;
                    s2 += v * v;
                }
            }
            const double m = s / count;
            const std::size_t i = static_cast<std::size_t>(y) * img.width + x;
            mean[i] = m;
            var[i] = std::max(0.0, s2 / count - m * m);
            nu += var[i];
        }
    }
    nu /= static_cast<double>(n);

    GrayImage out(img.width, img.height);
    for (std::size_t i = 0; i < n; ++i) {
        const double denom = std::max(var[i], nu);
        const double gain = denom > 0.0 ? std::max(0.0, var[i] - nu) / denom : 0.0;
        out.data[i] = mean[i] + gain * (img.data[i] - mean[i]);
    }
    return out;
}

GrayImage std_filter(const GrayImage& img, int kw, int kh) {
    require_nonempty(img);
    require_odd_window(kw, kh);
    const int rx = kw / 2, ry = kh / 2;
    const double count = static_cast<double>(kw) * kh;
    if (count < 2) throw InvalidArgument("std filter window needs at least two samples");
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double s = 0.0, s2 = 0.0;
            for (int dy = -ry; dy <= ry; ++dy) {
                for (int dx = -rx; dx <= rx; ++dx) {
                    const double v = img.at(clampi(x + dx, 0, img.width - 1),
                                            clampi(y + dy, 0, img.height - 1));
                    s += v;
                    s2 += v * v;
                }
            }
            const double var = std::max(0.0, (s2 - s * s / count) / (count - 1.0));
            out.at(x, y) = std::sqrt(var);
        }
    }
    return out;
}

GradientField gradient(const GrayImage& img, GradientKernel kernel) {
    require_nonempty(img);
    // Correlation kernels, y axis pointing down.
    static const double sobel_x[9] = {-1, 0, 1, -2, 0, 2, -1, 0, 1};
    static const double sobel_y[9] = {-1, -2, -1, 0, 0, 0, 1, 2, 1};
    static const double prewitt_x[9] = {-1, 0, 1, -1, 0, 1, -1, 0, 1};
    static const double prewitt_y[9] = {-1, -1, -1, 0, 0, 0, 1, 1, 1};
    const double* kx = kernel == GradientKernel::sobel ? sobel_x : prewitt_x;
    const double* ky = kernel == GradientKernel::sobel ? sobel_y : prewitt_y;

    GradientField out;
    out.magnitude = GrayImage(img.width, img.height);
    out.direction_deg = GrayImage(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double gx = 0.0, gy = 0.0;
            int i = 0;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx, ++i) {
                    const double v = img.at(clampi(x + dx, 0, img.width - 1),
                                            clampi(y + dy, 0, img.height - 1));
                    gx += kx[i] * v;
                    gy += ky[i] * v;
                }
            }
            out.magnitude.at(x, y) = std::hypot(gx, gy);
            out.direction_deg.at(x, y) = std::atan2(-gy, gx) * 180.0 / M_PI;
        }
    }
    return out;
}

GrayImage add_noise(const GrayImage& img, NoiseModel model, const NoiseParams& params,
                    std::uint64_t seed) {
    require_nonempty(img);
    Rng rng(seed);
    GrayImage out(img.width, img.height);
    switch (model) {
    case NoiseModel::gaussian: {
        if (params.variance < 0.0) throw InvalidArgument("gaussian variance must be >= 0");
        const double sd = std::sqrt(params.variance);
        for (std::size_t i = 0; i < img.size(); ++i) {
            out.data[i] = clamp01(img.data[i] + rng.normal(params.mean, sd));
        }
        break;
    }
    case NoiseModel::salt_pepper: {
        if (params.density < 0.0 || params.density > 1.0) {
            throw InvalidArgument("salt & pepper density must be in [0, 1]");
        }
        for (std::size_t i = 0; i < img.size(); ++i) {
            const double u = rng.uniform();
            if (u < params.density / 2.0) out.data[i] = 0.0;
            else if (u < params.density) out.data[i] = 1.0;
            else out.data[i] = img.data[i];
        }
        break;
    }
    case NoiseModel::poisson: {
        for (std::size_t i = 0; i < img.size(); ++i) {
            out.data[i] = clamp01(static_cast<double>(rng.poisson(clamp01(img.data[i]) * 255.0)) / 255.0);
        }
        break;
    }
    case NoiseModel::speckle: {
        if (params.variance < 0.0) throw InvalidArgument("speckle variance must be >= 0");
        const double a = std::sqrt(3.0 * params.variance); // zero-mean uniform with given variance
        for (std::size_t i = 0; i < img.size(); ++i) {
            out.data[i] = clamp01(img.data[i] + img.data[i] * rng.uniform(-a, a));
        }
        break;
    }
    }
    return out;
}

GrayImage repair_black_spots(const GrayImage& img, double threshold, double replacement) {
    require_nonempty(img);
    GrayImage out = img;
    for (double& v : out.data) {
        if (v < threshold) v = replacement;
    }
    return out;
}

} // namespace fer
