#pragma once

#include "fer/image.hpp"

#include <complex>
#include <vector>

namespace fer {

// 2-D spectrum, row-major, any rectangular size.  `centered` records whether
// fftshift has moved DC to (floor(h/2), floor(w/2)).
struct Spectrum {
    int width = 0;
    int height = 0;
    bool centered = false;
    std::vector<std::complex<double>> data;

    std::complex<double>& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    std::complex<double> at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

// Forward DFT (unnormalized, DC at index 0).  pad_w/pad_h >= image dims embed
// the image in a zero-padded frame; 0 means "use the image size".  Arbitrary
// sizes are supported, including primes.
Spectrum fft2(const GrayImage& img, int pad_w = 0, int pad_h = 0);

// Inverse DFT scaled by 1/(w*h); returns the real part.
GrayImage ifft2_real(const Spectrum& s);

// Inverse DFT scaled by 1/(w*h), complex output.
Spectrum ifft2(const Spectrum& s);

// Quadrant swap moving DC to (floor(h/2), floor(w/2)); ifftshift undoes it
// for any (odd or even) size.
Spectrum fftshift(const Spectrum& s);
Spectrum ifftshift(const Spectrum& s);

// Band-pass filter grid of size (2*h-1) x (2*w-1), row-major:
// g = lowpass(d1) * (1 - lowpass(d0)) with lowpass(d) = 1/(1 + (dist/d)^(2n))
// and dist the Euclidean distance from the grid point (h, w) (0-based).
std::vector<double> butterworth_filter(int w, int h, double d0, double d1, int order);

// Frequency-domain band emphasis: the image is zero-padded to (2h-1, 2w-1),
// transformed, and its spectrum scaled by (1 + g) with the filter above (the
// original signal is kept and the selected band is added on top).  The result
// is cropped back to the input size and clamped to [0, 1].  Small d0/d1 pick
// low frequencies (smoothing); a wide band starting near 0 emphasizes high
// frequencies (sharpening).
GrayImage butterworth_bandpass(const GrayImage& img, double d0, double d1, int order);

} // namespace fer
