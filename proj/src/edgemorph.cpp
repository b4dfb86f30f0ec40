#include "fer/edgemorph.hpp"

#include "fer/enhance.hpp"
#include "fer/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace fer {

namespace {

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double percentile_sorted(std::vector<double>& v, double p) {
    std::sort(v.begin(), v.end());
    const double idx = p * (static_cast<double>(v.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = idx - static_cast<double>(lo);
    return v[lo] + frac * (v[hi] - v[lo]);
}

BinaryImage threshold_magnitude(const GrayImage& mag, double thr) {
    BinaryImage out(mag.width, mag.height);
    for (std::size_t i = 0; i < mag.size(); ++i) out.data[i] = mag.data[i] > thr ? 1 : 0;
    return out;
}

GrayImage roberts_magnitude(const GrayImage& img) {
    GrayImage mag(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const int x1 = clampi(x + 1, 0, img.width - 1);
            const int y1 = clampi(y + 1, 0, img.height - 1);
            const double g1 = img.at(x, y) - img.at(x1, y1);
            const double g2 = img.at(x1, y) - img.at(x, y1);
            mag.at(x, y) = std::hypot(g1, g2);
        }
    }
    return mag;
}

// Dense correlation with replicate padding (kernels are small).
GrayImage correlate(const GrayImage& img, const std::vector<double>& k, int kw, int kh) {
    const int rx = kw / 2, ry = kh / 2;
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            int i = 0;
            for (int dy = -ry; dy <= ry; ++dy) {
                for (int dx = -rx; dx <= rx; ++dx, ++i) {
                    acc += k[i] * img.at(clampi(x + dx, 0, img.width - 1),
                                         clampi(y + dy, 0, img.height - 1));
                }
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

std::vector<double> log_kernel(double sigma, int& ksize) {
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    ksize = 2 * r + 1;
    std::vector<double> k(static_cast<std::size_t>(ksize) * ksize);
    const double s2 = sigma * sigma;
    double sum = 0.0;
    int i = 0;
    for (int y = -r; y <= r; ++y) {
        for (int x = -r; x <= r; ++x, ++i) {
            const double q = (x * x + y * y) / (2.0 * s2);
            k[i] = (q - 1.0) / (M_PI * s2 * s2) * std::exp(-q);
            sum += k[i];
        }
    }
    // Force zero response on constant inputs.
    const double adj = sum / static_cast<double>(k.size());
    for (double& v : k) v -= adj;
    return k;
}

// Marks sign changes between 4-neighbors whose response difference exceeds
// the slope threshold; the pixel nearer zero carries the edge.
BinaryImage zero_crossings(const GrayImage& resp, double thr) {
    BinaryImage out(resp.width, resp.height);
    auto mark = [&](int xa, int ya, int xb, int yb) {
        const double a = resp.at(xa, ya), b = resp.at(xb, yb);
        if (a * b < 0.0 && std::abs(a - b) > thr) {
            if (std::abs(a) <= std::abs(b)) out.at(xa, ya) = 1;
            else out.at(xb, yb) = 1;
        }
    };
    for (int y = 0; y < resp.height; ++y) {
        for (int x = 0; x < resp.width; ++x) {
            if (x + 1 < resp.width) mark(x, y, x + 1, y);
            if (y + 1 < resp.height) mark(x, y, x, y + 1);
        }
    }
    return out;
}

BinaryImage edge_zerocross_common(const GrayImage& resp, std::optional<double> threshold) {
    std::vector<double> absresp(resp.size());
    for (std::size_t i = 0; i < resp.size(); ++i) absresp[i] = std::abs(resp.data[i]);
    const double thr = threshold.value_or(0.75 * mean_of(absresp));
    return zero_crossings(resp, thr);
}

// Non-maximum suppression with deterministic tie-breaking: a pixel survives
// when it is >= its neighbor along the positive gradient direction and
// strictly > the neighbor along the negative direction, so exactly one of two
// equal ridge pixels is kept.
GrayImage nms(const GradientField& g) {
    const int w = g.magnitude.width, h = g.magnitude.height;
    GrayImage out(w, h, 0.0);
    auto mag_at = [&](int x, int y) {
        if (x < 0 || x >= w || y < 0 || y >= h) return 0.0;
        return g.magnitude.at(x, y);
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double m = g.magnitude.at(x, y);
            if (m <= 0.0) continue;
            double ang = g.direction_deg.at(x, y);
            ang = std::fmod(ang + 360.0, 180.0); // unsigned orientation
            int dx, dy;
            if (ang < 22.5 || ang >= 157.5) { dx = 1; dy = 0; }
            else if (ang < 67.5) { dx = 1; dy = -1; } // direction uses -gy (y up)
            else if (ang < 112.5) { dx = 0; dy = -1; }
            else { dx = -1; dy = -1; }
            const double m_plus = mag_at(x + dx, y + dy);
            const double m_minus = mag_at(x - dx, y - dy);
            if (m >= m_plus && m > m_minus) out.at(x, y) = m;
        }
    }
    return out;
}

BinaryImage edge_canny(const GrayImage& img, std::optional<double> threshold, bool hysteresis) {
    const GrayImage smooth = gaussian_blur(img, std::sqrt(2.0));
    const GradientField g = gradient(smooth, GradientKernel::sobel);

    std::vector<double> nonzero;
    nonzero.reserve(g.magnitude.size());
    for (double m : g.magnitude.data) {
        if (m > 0.0) nonzero.push_back(m);
    }
    BinaryImage out(img.width, img.height);
    if (nonzero.empty()) return out; // constant image

    const double high = threshold.value_or(percentile_sorted(nonzero, 0.70));
    const double low = 0.4 * high;
    const GrayImage thin = nms(g);

    if (!hysteresis) return threshold_magnitude(thin, high);

    std::deque<std::pair<int, int>> frontier;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (thin.at(x, y) > high) {
                out.at(x, y) = 1;
                frontier.emplace_back(x, y);
            }
        }
    }
    while (!frontier.empty()) {
        auto [x, y] = frontier.front();
        frontier.pop_front();
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int nx = x + dx, ny = y + dy;
                if (nx < 0 || nx >= img.width || ny < 0 || ny >= img.height) continue;
                if (!out.at(nx, ny) && thin.at(nx, ny) > low) {
                    out.at(nx, ny) = 1;
                    frontier.emplace_back(nx, ny);
                }
            }
        }
    }
    return out;
}

} // namespace

BinaryImage edge(const GrayImage& img, EdgeMethod method, std::optional<double> threshold) {
    if (img.empty()) throw ShapeError("edge detection requires a non-empty image");
    switch (method) {
    case EdgeMethod::sobel:
    case EdgeMethod::prewitt: {
        const GradientKernel k = method == EdgeMethod::sobel ? GradientKernel::sobel
                                                             : GradientKernel::prewitt;
        const GradientField g = gradient(img, k);
        const double thr = threshold.value_or(4.0 * mean_of(g.magnitude.data));
        return threshold_magnitude(g.magnitude, thr);
    }
    case EdgeMethod::roberts: {
        const GrayImage mag = roberts_magnitude(img);
        const double thr = threshold.value_or(4.0 * mean_of(mag.data));
        return threshold_magnitude(mag, thr);
    }
    case EdgeMethod::log: {
        int ksize = 0;
        const std::vector<double> k = log_kernel(2.0, ksize);
        return edge_zerocross_common(correlate(img, k, ksize, ksize), threshold);
    }
    case EdgeMethod::zerocross: {
        const std::vector<double> lap = {0, 1, 0, 1, -4, 1, 0, 1, 0};
        return edge_zerocross_common(correlate(img, lap, 3, 3), threshold);
    }
    case EdgeMethod::canny:
        return edge_canny(img, threshold, true);
    case EdgeMethod::approxcanny:
        return edge_canny(img, threshold, false);
    }
    throw InvalidArgument("unknown edge method");
}

BinaryImage binarize(const GrayImage& img, double threshold) {
    if (img.empty()) throw ShapeError("binarize requires a non-empty image");
    BinaryImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.size(); ++i) out.data[i] = img.data[i] > threshold ? 1 : 0;
    return out;
}

Strel disk_strel(int r) {
    if (r < 0) throw InvalidArgument("disk radius must be >= 0");
    Strel se;
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            if (dx * dx + dy * dy <= r * r) se.offsets.emplace_back(dx, dy);
        }
    }
    return se;
}

Strel rect_strel(int kw, int kh) {
    if (kw <= 0 || kh <= 0) throw InvalidArgument("rectangle sides must be positive");
    Strel se;
    for (int dy = -((kh - 1) / 2); dy <= kh / 2; ++dy) {
        for (int dx = -((kw - 1) / 2); dx <= kw / 2; ++dx) {
            se.offsets.emplace_back(dx, dy);
        }
    }
    return se;
}

namespace {

GrayImage morph(const GrayImage& img, const Strel& se, bool is_erode) {
    if (img.empty()) throw ShapeError("morphology requires a non-empty image");
    if (se.offsets.empty()) throw InvalidArgument("structuring element is empty");
    const double pad = is_erode ? 1.0 : 0.0;
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double v = pad;
            for (const auto& [dx, dy] : se.offsets) {
                const int sx = x + dx, sy = y + dy;
                const double s = (sx < 0 || sx >= img.width || sy < 0 || sy >= img.height)
                                     ? pad
                                     : img.at(sx, sy);
                v = is_erode ? std::min(v, s) : std::max(v, s);
            }
            out.at(x, y) = v;
        }
    }
    return out;
}

} // namespace

GrayImage erode(const GrayImage& img, const Strel& se) { return morph(img, se, true); }
GrayImage dilate(const GrayImage& img, const Strel& se) { return morph(img, se, false); }
GrayImage morph_open(const GrayImage& img, const Strel& se) { return dilate(erode(img, se), se); }
GrayImage morph_close(const GrayImage& img, const Strel& se) { return erode(dilate(img, se), se); }

GrayImage tophat(const GrayImage& img, const Strel& se) {
    const GrayImage opened = morph_open(img, se);
    GrayImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.size(); ++i) out.data[i] = clamp01(img.data[i] - opened.data[i]);
    return out;
}

GrayImage bothat(const GrayImage& img, const Strel& se) {
    const GrayImage closed = morph_close(img, se);
    GrayImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.size(); ++i) out.data[i] = clamp01(closed.data[i] - img.data[i]);
    return out;
}

BinaryImage fill_holes(const BinaryImage& img) {
    if (img.empty()) throw ShapeError("fill_holes requires a non-empty image");
    BinaryImage reached(img.width, img.height);
    std::deque<std::pair<int, int>> frontier;
    auto push_bg = [&](int x, int y) {
        if (!img.at(x, y) && !reached.at(x, y)) {
            reached.at(x, y) = 1;
            frontier.emplace_back(x, y);
        }
    };
    for (int x = 0; x < img.width; ++x) {
        push_bg(x, 0);
        push_bg(x, img.height - 1);
    }
    for (int y = 0; y < img.height; ++y) {
        push_bg(0, y);
        push_bg(img.width - 1, y);
    }
    while (!frontier.empty()) {
        auto [x, y] = frontier.front();
        frontier.pop_front();
        if (x > 0) push_bg(x - 1, y);
        if (x + 1 < img.width) push_bg(x + 1, y);
        if (y > 0) push_bg(x, y - 1);
        if (y + 1 < img.height) push_bg(x, y + 1);
    }
    BinaryImage out = img;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!out.data[i] && !reached.data[i]) out.data[i] = 1;
    }
    return out;
}

} // namespace fer
