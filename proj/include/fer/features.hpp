#pragma once

#include "fer/featmat.hpp"
#include "fer/image.hpp"

#include <complex>
#include <set>
#include <string>
#include <vector>

namespace fer {

// Integer-valued image (LBP / LPQ codeword maps).
struct IntImage {
    int width = 0;
    int height = 0;
    std::vector<int> data;

    IntImage() = default;
    IntImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0) {}
    int& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    int at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return data.size(); }
};

struct FeatureVector {
    std::vector<double> values;
    std::string tag;         // descriptor name
    std::string fingerprint; // parameter summary, e.g. "cell=8x8"
};

// --- Local binary patterns -------------------------------------------------

// Per-pixel 8-bit code over the 1-pixel-interior: bit k set iff the k-th
// neighbor (clockwise from the top-left) is >= the center.  Returned image is
// (w-2) x (h-2).
IntImage lbp_codes(const GrayImage& img);

// Uniform-pattern cell histograms: cells tile the image (partial cells
// dropped), interior-pixel codes are binned into 58 uniform patterns
// (ascending code order) plus one catch-all bin, and each cell histogram is
// L2-normalized (zero cells stay zero).  Length = cells * 59.
FeatureVector lbp_features(const GrayImage& img, int cell_w = 8, int cell_h = 8);

// --- Histograms of oriented gradients ---------------------------------------

// Centered-difference gradients, 9 edge-orientation bins over [0, 180) with
// bilinear magnitude votes, 2x2-cell blocks at stride 1 cell, per-block
// L2 normalization with denominator sqrt(sum + 1e-6).
// Length = (cells_x-1) * (cells_y-1) * 36.
FeatureVector hog_features(const GrayImage& img, int cell_w = 8, int cell_h = 8);

// --- Local phase quantization ------------------------------------------------

enum class LpqMode { nh, h, im };

struct LpqResult {
    FeatureVector histogram; // modes nh / h (256 bins)
    IntImage codes;          // mode im (also filled for nh/h)
};

// Short-term Fourier phase descriptor.  freq_estim selects the 1-D filter
// family: 1 = uniform STFT window, 2 = Gaussian-windowed STFT, 3 = Gaussian
// derivative quadrature pair.  decorr applies the rho=0.9 whitening
// transform.  Window must be odd and >= 3.
LpqResult lpq(const GrayImage& img, int win_size = 3, bool decorr = true,
              int freq_estim = 1, LpqMode mode = LpqMode::nh);

FeatureVector lpq_features(const GrayImage& img, int win_size = 3, bool decorr = true,
                           int freq_estim = 1);

// --- Gabor -------------------------------------------------------------------

struct GaborBank {
    int scales = 0;       // u
    int orientations = 0; // v
    int rows = 0;         // m (kernel height)
    int cols = 0;         // n (kernel width)
    // scale-major, orientation-minor; each kernel row-major, rows x cols
    std::vector<std::vector<std::complex<double>>> kernels;
};

// fmax = 0.25, gamma = eta = sqrt(2); scale i has frequency fmax/sqrt(2)^(i-1),
// orientation j has angle ((j-1)/v)*pi.  Kernel dims must be odd.
GaborBank gabor_bank(int u, int v, int m, int n);

// 'same' complex convolution with each kernel (zero padding), magnitude,
// downsampling by keeping every d1-th row / d2-th column starting at the
// first, column-major flattening, and per-kernel z-scoring (population std;
// zero-variance blocks output zeros).  d1 must divide the image height and
// d2 the width.  Length = w*h*u*v/(d1*d2).
FeatureVector gabor_features(const GrayImage& img, const GaborBank& bank, int d1, int d2);

// --- Depth face extraction ----------------------------------------------------

// Face crop from a depth map (smaller intensity = closer).  Steps: nose tip =
// darkest pixel above the black-spot floor (30/255); square crop of
// crop_half_width around it (clamped); 5x5 std-filter of the crop binarized
// at 0.02 and an ellipse fitted to the foreground by second-order moments
// (2-sigma axes); pixels outside the ellipse zeroed; side_trim fraction
// removed from each side.
GrayImage extract_depth_face(const GrayImage& depth, int crop_half_width = 70,
                             double side_trim = 0.1);

// --- FACS ---------------------------------------------------------------------

// Exact-set lookup of the four tabulated action-unit combinations; anything
// else is "Unknown".
std::string facs_expression(const std::set<int>& action_units);

} // namespace fer
