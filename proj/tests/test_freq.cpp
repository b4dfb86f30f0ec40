#include "fer/error.hpp"
#include "fer/freq.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace fer;

TEST_SUITE("freq") {

TEST_CASE("impulse transforms to a flat spectrum and DC to a point mass") {
    GrayImage impulse(8, 6, 0.0);
    impulse.at(0, 0) = 1.0;
    const Spectrum s = fft2(impulse);
    REQUIRE(s.width == 8);
    REQUIRE(s.height == 6);
    for (const std::complex<double>& v : s.data) {
        CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(v.imag() == doctest::Approx(0.0).epsilon(1e-12));
    }

    GrayImage flat(5, 7, 0.3);
    const Spectrum d = fft2(flat);
    CHECK(d.at(0, 0).real() == doctest::Approx(0.3 * 35).epsilon(1e-12));
    CHECK(std::abs(d.at(1, 0)) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(std::abs(d.at(0, 3)) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("round trip through forward and inverse is near-exact") {
    Rng rng(41);
    for (const auto& [w, h] : {std::pair{16, 16}, std::pair{13, 9}, std::pair{31, 17}}) {
        const GrayImage img = testutil::random_gray(w, h, rng);
        const GrayImage back = ifft2_real(fft2(img));
        double max_err = 0.0;
        for (std::size_t i = 0; i < img.size(); ++i) {
            max_err = std::max(max_err, std::abs(img.data[i] - back.data[i]));
        }
        CHECK(max_err <= 1e-10);
    }
}

TEST_CASE("zero-padded transform round-trips to the embedded image") {
    Rng rng(42);
    const GrayImage img = testutil::random_gray(10, 8, rng);
    const Spectrum s = fft2(img, 19, 15); // (2w-1, 2h-1)
    REQUIRE(s.width == 19);
    REQUIRE(s.height == 15);
    const GrayImage back = ifft2_real(s);
    for (int y = 0; y < 15; ++y) {
        for (int x = 0; x < 19; ++x) {
            const double want = (x < 10 && y < 8) ? img.at(x, y) : 0.0;
            CHECK(back.at(x, y) == doctest::Approx(want).epsilon(1e-10));
        }
    }
    CHECK_THROWS_AS(fft2(img, 4, 20), InvalidArgument); // pad smaller than image
}

TEST_CASE("parseval energy balance holds") {
    Rng rng(43);
    const GrayImage img = testutil::random_gray(21, 13, rng);
    const Spectrum s = fft2(img);
    double spatial = 0.0;
    for (double v : img.data) spatial += v * v;
    double spectral = 0.0;
    for (const std::complex<double>& v : s.data) spectral += std::norm(v);
    spectral /= static_cast<double>(img.size());
    CHECK(std::abs(spatial - spectral) / spatial <= 1e-12);
}

TEST_CASE("linearity of the transform") {
    Rng rng(44);
    const GrayImage a = testutil::random_gray(9, 9, rng);
    const GrayImage b = testutil::random_gray(9, 9, rng);
    GrayImage sum(9, 9);
    for (std::size_t i = 0; i < sum.size(); ++i) sum.data[i] = 2.0 * a.data[i] + b.data[i];
    const Spectrum sa = fft2(a), sb = fft2(b), ss = fft2(sum);
    for (std::size_t i = 0; i < ss.data.size(); ++i) {
        CHECK(std::abs(ss.data[i] - (2.0 * sa.data[i] + sb.data[i])) <= 1e-10);
    }
}

TEST_CASE("fftshift moves DC to the floor-center and ifftshift undoes it") {
    for (const auto& [w, h] : {std::pair{7, 5}, std::pair{8, 6}, std::pair{9, 4}}) {
        Rng rng(45);
        const GrayImage img = testutil::random_gray(w, h, rng);
        const Spectrum s = fft2(img);
        const Spectrum sh = fftshift(s);
        CHECK(sh.centered);
        CHECK(sh.at(w / 2, h / 2) == s.at(0, 0));
        const Spectrum back = ifftshift(sh);
        CHECK_FALSE(back.centered);
        for (std::size_t i = 0; i < s.data.size(); ++i) {
            CHECK(back.data[i] == s.data[i]);
        }
    }
}

TEST_CASE("butterworth grid geometry and band shape") {
    const int w = 12, h = 9, order = 2;
    const double d0 = 3.0, d1 = 8.0;
    const std::vector<double> g = butterworth_filter(w, h, d0, d1, order);
    const int gw = 2 * w - 1, gh = 2 * h - 1;
    REQUIRE(static_cast<int>(g.size()) == gw * gh);
    auto at = [&](int x, int y) { return g[static_cast<std::size_t>(y) * gw + x]; };

    // Zero response at the grid's DC point (h, w) 0-based.
    CHECK(at(w, h) == doctest::Approx(0.0).epsilon(1e-12));
    // Radially symmetric.
    CHECK(at(w + 4, h) == doctest::Approx(at(w - 4, h)));
    CHECK(at(w, h + 4) == doctest::Approx(at(w, h - 4)));
    // Rises from DC into the band, falls past the outer cutoff.
    const double mid = at(w + 5, h);
    CHECK(mid > at(w + 1, h));
    CHECK(mid > 0.5);
    const double expect = (1.0 / (1.0 + std::pow(5.0 / d1, 2.0 * order))) *
                          (1.0 - 1.0 / (1.0 + std::pow(5.0 / d0, 2.0 * order)));
    CHECK(mid == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("bandpass with a negligible band is the identity") {
    Rng rng(46);
    const GrayImage img = testutil::random_gray(14, 11, rng);
    const GrayImage out = butterworth_bandpass(img, 1e-9, 1e-9, 2);
    for (std::size_t i = 0; i < img.size(); ++i) {
        CHECK(out.data[i] == doctest::Approx(img.data[i]).epsilon(1e-9));
    }
}

TEST_CASE("bandpass boosts in-band structure") {
    // Low-contrast vertical sinusoid at a mid frequency.
    const int n = 32;
    GrayImage img(n, n);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            img.at(x, y) = 0.5 + 0.05 * std::sin(2.0 * M_PI * 6.0 * x / n);
        }
    }
    const GrayImage out = butterworth_bandpass(img, 2.0, 30.0, 2);
    double in_amp = 0.0, out_amp = 0.0;
    for (double v : img.data) in_amp = std::max(in_amp, std::abs(v - 0.5));
    double mean = 0.0;
    for (double v : out.data) mean += v;
    mean /= out.size();
    for (double v : out.data) out_amp = std::max(out_amp, std::abs(v - mean));
    CHECK(out_amp > 1.5 * in_amp);
    for (double v : out.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

} // TEST_SUITE
