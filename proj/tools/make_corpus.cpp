// Generates the bundled synthetic mini-corpus: 4 classes x 20 samples, each a
// 64x64 color image plus a paired depth map.  Classes differ by oriented
// texture so the descriptors have real signal to find.  Fully deterministic.
#include "fer/image.hpp"
#include "fer/rng.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>

namespace fs = std::filesystem;

namespace {

constexpr int kSize = 64;
constexpr int kPerClass = 20;
constexpr double kPi = 3.14159265358979323846;

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

// Oriented textures, one per class.
double pattern(int cls, double x, double y, double freq, double phase) {
    switch (cls) {
    case 0: return std::sin(2.0 * kPi * freq * x / kSize + phase);
    case 1: return std::sin(2.0 * kPi * freq * y / kSize + phase);
    case 2:
        return std::sin(2.0 * kPi * freq * (x + y) / kSize + phase) *
               std::sin(2.0 * kPi * freq * (x - y) / kSize + phase);
    default: {
        const double r = std::hypot(x - kSize / 2.0, y - kSize / 2.0);
        return std::sin(2.0 * kPi * freq * r / kSize + phase);
    }
    }
}

double dome(double x, double y) {
    const double dx = (x - kSize / 2.0) / (0.7 * kSize);
    const double dy = (y - kSize / 2.0) / (0.7 * kSize);
    const double d = 1.0 - dx * dx - dy * dy;
    return d > 0.0 ? std::sqrt(d) : 0.0;
}

} // namespace

int main(int argc, char** argv) {
    const std::string out_dir = argc > 1 ? argv[1] : "data/minicorpus";
    const char* classes[4] = {"anger", "joy", "sadness", "surprise"};
    fer::Rng rng(414213562);

    for (int c = 0; c < 4; ++c) {
        const fs::path cdir = fs::path(out_dir) / classes[c];
        fs::create_directories(cdir);
        for (int s = 0; s < kPerClass; ++s) {
            char stem[8];
            std::snprintf(stem, sizeof(stem), "s%02d", s + 1);

            const double phase = rng.uniform(0.0, 2.0 * kPi);
            const double freq = 5.0 + rng.uniform(-0.5, 0.5);
            const double gain_r = 0.9 + 0.1 * rng.uniform();
            const double gain_g = 0.9 + 0.1 * rng.uniform();
            const double gain_b = 0.9 + 0.1 * rng.uniform();

            fer::RgbImage color(kSize, kSize);
            for (int y = 0; y < kSize; ++y) {
                for (int x = 0; x < kSize; ++x) {
                    const double base = 0.35 + 0.35 * dome(x, y);
                    const double tex = 0.22 * pattern(c, x, y, freq, phase);
                    const double n = 0.02 * rng.normal();
                    const double v = base + tex + n;
                    const std::size_t i = static_cast<std::size_t>(y) * kSize + x;
                    color.r[i] = clamp01(v * gain_r);
                    color.g[i] = clamp01(v * gain_g);
                    color.b[i] = clamp01(v * gain_b);
                }
            }

            const double dphase = rng.uniform(0.0, 2.0 * kPi);
            const double dfreq = 2.5 + rng.uniform(-0.3, 0.3);
            fer::GrayImage depth(kSize, kSize);
            for (int y = 0; y < kSize; ++y) {
                for (int x = 0; x < kSize; ++x) {
                    const double v = 0.25 + 0.5 * dome(x, y) +
                                     0.12 * pattern(c, x, y, dfreq, dphase) +
                                     0.015 * rng.normal();
                    depth.at(x, y) = clamp01(v);
                }
            }

            fer::save_image(color, (cdir / ("color_" + std::string(stem) + ".ppm")).string());
            fer::save_image(depth, (cdir / ("depth_" + std::string(stem) + ".pgm")).string());
        }
    }
    std::cout << "wrote 4 x " << kPerClass << " color+depth pairs under " << out_dir << "\n";
    return 0;
}
