#include "fer/freq.hpp"

#include "fer/error.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace fer {

namespace {

// FFTW planning is not thread-safe; execution of a plan on the arrays it was
// created with is.  Plans are cheap with FFTW_ESTIMATE, so we plan per call
// under a lock and execute immediately.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void run_dft(std::vector<std::complex<double>>& buf, int w, int h, int sign) {
    fftw_complex* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_2d(h, w, p, p, sign, FFTW_ESTIMATE);
    }
    if (!plan) throw Error("FFT planning failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
}

Spectrum shift_by(const Spectrum& s, int dx, int dy) {
    Spectrum out;
    out.width = s.width;
    out.height = s.height;
    out.centered = s.centered;
    out.data.resize(s.data.size());
    for (int y = 0; y < s.height; ++y) {
        const int ty = (y + dy) % s.height;
        for (int x = 0; x < s.width; ++x) {
            const int tx = (x + dx) % s.width;
            out.data[static_cast<std::size_t>(ty) * s.width + tx] =
                s.data[static_cast<std::size_t>(y) * s.width + x];
        }
    }
    return out;
}

} // namespace

Spectrum fft2(const GrayImage& img, int pad_w, int pad_h) {
    if (img.empty()) throw ShapeError("fft2 requires a non-empty image");
    const int w = pad_w == 0 ? img.width : pad_w;
    const int h = pad_h == 0 ? img.height : pad_h;
    if (w < img.width || h < img.height) {
        throw InvalidArgument("fft2 padding must not be smaller than the image");
    }
    Spectrum s;
    s.width = w;
    s.height = h;
    s.centered = false;
    s.data.assign(static_cast<std::size_t>(w) * h, {0.0, 0.0});
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            s.data[static_cast<std::size_t>(y) * w + x] = {img.at(x, y), 0.0};
        }
    }
    run_dft(s.data, w, h, FFTW_FORWARD);
    return s;
}

Spectrum ifft2(const Spectrum& s) {
    if (s.data.empty()) throw ShapeError("ifft2 requires a non-empty spectrum");
    Spectrum out = s;
    run_dft(out.data, out.width, out.height, FFTW_BACKWARD);
    const double scale = 1.0 / (static_cast<double>(out.width) * out.height);
    for (auto& v : out.data) v *= scale;
    out.centered = false;
    return out;
}

GrayImage ifft2_real(const Spectrum& s) {
    const Spectrum t = ifft2(s);
    GrayImage img(t.width, t.height);
    for (std::size_t i = 0; i < t.data.size(); ++i) img.data[i] = t.data[i].real();
    return img;
}

Spectrum fftshift(const Spectrum& s) {
    Spectrum out = shift_by(s, s.width / 2, s.height / 2);
    out.centered = true;
    return out;
}

Spectrum ifftshift(const Spectrum& s) {
    Spectrum out = shift_by(s, (s.width + 1) / 2, (s.height + 1) / 2);
    out.centered = false;
    return out;
}

std::vector<double> butterworth_filter(int w, int h, double d0, double d1, int order) {
    if (w <= 0 || h <= 0) throw InvalidArgument("filter size must be positive");
    if (!(d0 > 0.0) || !(d1 > 0.0) || order <= 0) {
        throw InvalidArgument("butterworth cutoffs and order must be positive");
    }
    const int rows = 2 * h - 1, cols = 2 * w - 1;
    std::vector<double> g(static_cast<std::size_t>(rows) * cols);
    const double p = 2.0 * order;
    for (int y = 0; y < rows; ++y) {
        for (int x = 0; x < cols; ++x) {
            const double dist = std::hypot(static_cast<double>(y - h), static_cast<double>(x - w));
            const double lp1 = 1.0 / (1.0 + std::pow(dist / d1, p));
            const double lp0 = 1.0 / (1.0 + std::pow(dist / d0, p));
            g[static_cast<std::size_t>(y) * cols + x] = lp1 * (1.0 - lp0);
        }
    }
    return g;
}

GrayImage butterworth_bandpass(const GrayImage& img, double d0, double d1, int order) {
    if (img.empty()) throw ShapeError("butterworth_bandpass requires a non-empty image");
    const int rows = 2 * img.height - 1, cols = 2 * img.width - 1;

    Spectrum spec = fftshift(fft2(img, cols, rows));
    const std::vector<double> g = butterworth_filter(img.width, img.height, d0, d1, order);
    for (std::size_t i = 0; i < spec.data.size(); ++i) {
        spec.data[i] += g[i] * spec.data[i]; // keep the signal, add the band
    }
    const GrayImage full = ifft2_real(ifftshift(spec));

    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            out.at(x, y) = clamp01(full.at(x, y));
        }
    }
    return out;
}

} // namespace fer
