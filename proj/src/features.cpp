#include "fer/features.hpp"

#include "fer/enhance.hpp"
#include "fer/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>

namespace fer {

namespace {

std::string dims_fingerprint(const std::string& a, int x, int y) {
    return a + "=" + std::to_string(x) + "x" + std::to_string(y);
}

// --- LBP ---------------------------------------------------------------

// Clockwise from the top-left neighbor.
constexpr int kLbpOffsets[8][2] = {
    {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0},
};

int circular_transitions(int code) {
    int t = 0;
    for (int k = 0; k < 8; ++k) {
        const int a = (code >> k) & 1;
        const int b = (code >> ((k + 1) % 8)) & 1;
        if (a != b) ++t;
    }
    return t;
}

// Uniform patterns (<= 2 transitions) get bins 0..57 in ascending code
// order; everything else shares bin 58.
const std::array<int, 256>& lbp_bin_map() {
    static const std::array<int, 256> map = [] {
        std::array<int, 256> m{};
        int next = 0;
        for (int c = 0; c < 256; ++c) {
            m[c] = circular_transitions(c) <= 2 ? next++ : -1;
        }
        for (int c = 0; c < 256; ++c) {
            if (m[c] < 0) m[c] = 58;
        }
        return m;
    }();
    return map;
}

} // namespace

IntImage lbp_codes(const GrayImage& img) {
    if (img.width < 3 || img.height < 3) {
        throw InvalidArgument("LBP needs an image of at least 3x3");
    }
    IntImage out(img.width - 2, img.height - 2);
    for (int y = 1; y + 1 < img.height; ++y) {
        for (int x = 1; x + 1 < img.width; ++x) {
            const double c = img.at(x, y);
            int code = 0;
            for (int k = 0; k < 8; ++k) {
                if (img.at(x + kLbpOffsets[k][0], y + kLbpOffsets[k][1]) >= c) {
                    code |= 1 << k;
                }
            }
            out.at(x - 1, y - 1) = code;
        }
    }
    return out;
}

FeatureVector lbp_features(const GrayImage& img, int cell_w, int cell_h) {
    constexpr int BINS = 59;
    if (cell_w < 3 || cell_h < 3) throw InvalidArgument("LBP cell dims must be >= 3");
    if (img.width < cell_w || img.height < cell_h) {
        throw InvalidArgument("image smaller than one LBP cell");
    }
    const int cells_x = img.width / cell_w;
    const int cells_y = img.height / cell_h;
    const IntImage codes = lbp_codes(img);
    const std::array<int, 256>& bins = lbp_bin_map();

    std::vector<double> hist(static_cast<std::size_t>(cells_x) * cells_y * BINS, 0.0);
    for (int y = 1; y + 1 < img.height; ++y) {
        const int cy = y / cell_h;
        if (cy >= cells_y) continue; // partial cell dropped
        for (int x = 1; x + 1 < img.width; ++x) {
            const int cx = x / cell_w;
            if (cx >= cells_x) continue;
            const std::size_t cell = static_cast<std::size_t>(cy) * cells_x + cx;
            hist[cell * BINS + bins[codes.at(x - 1, y - 1)]] += 1.0;
        }
    }
    for (int cell = 0; cell < cells_x * cells_y; ++cell) {
        double norm = 0.0;
        for (int b = 0; b < BINS; ++b) {
            const double v = hist[static_cast<std::size_t>(cell) * BINS + b];
            norm += v * v;
        }
        if (norm > 0.0) {
            // Divide (rather than multiply by the reciprocal) so a one-bin
            // cell normalizes to exactly 1.
            const double len = std::sqrt(norm);
            for (int b = 0; b < BINS; ++b) hist[static_cast<std::size_t>(cell) * BINS + b] /= len;
        }
    }
    return {std::move(hist), "lbp", dims_fingerprint("cell", cell_w, cell_h)};
}

// --- HOG ---------------------------------------------------------------

FeatureVector hog_features(const GrayImage& img, int cell_w, int cell_h) {
    constexpr int BINS = 9;
    constexpr double BIN_W = 180.0 / BINS;
    if (cell_w < 2 || cell_h < 2) throw InvalidArgument("HOG cell dims must be >= 2");
    if (img.width < 2 * cell_w || img.height < 2 * cell_h) {
        throw InvalidArgument("HOG needs at least a 2x2 block of cells");
    }
    const int cells_x = img.width / cell_w;
    const int cells_y = img.height / cell_h;

    std::vector<double> cell_hist(static_cast<std::size_t>(cells_x) * cells_y * BINS, 0.0);
    for (int y = 0; y < cells_y * cell_h; ++y) {
        const int cy = y / cell_h;
        for (int x = 0; x < cells_x * cell_w; ++x) {
            const int cx = x / cell_w;
            const double gx = img.at(std::min(x + 1, img.width - 1), y) -
                              img.at(std::max(x - 1, 0), y);
            const double gy = img.at(x, std::min(y + 1, img.height - 1)) -
                              img.at(x, std::max(y - 1, 0));
            const double mag = std::hypot(gx, gy);
            if (mag == 0.0) continue;
            // Edge orientation (gradient rotated 90 deg), folded to [0, 180).
            double ang = std::atan2(-gy, gx) * 180.0 / M_PI + 90.0;
            ang = std::fmod(ang + 360.0, 180.0);
            // Bilinear vote between adjacent bin centers (k + 0.5) * 20.
            const double t = ang / BIN_W - 0.5;
            const int k0 = static_cast<int>(std::floor(t));
            const double w1 = t - k0;
            const int b0 = ((k0 % BINS) + BINS) % BINS;
            const int b1 = (b0 + 1) % BINS;
            const std::size_t cell = static_cast<std::size_t>(cy) * cells_x + cx;
            cell_hist[cell * BINS + b0] += mag * (1.0 - w1);
            cell_hist[cell * BINS + b1] += mag * w1;
        }
    }

    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(cells_x - 1) * (cells_y - 1) * 4 * BINS);
    for (int by = 0; by + 1 < cells_y; ++by) {
        for (int bx = 0; bx + 1 < cells_x; ++bx) {
            double block[4 * BINS];
            int n = 0;
            double sumsq = 0.0;
            for (int dy = 0; dy < 2; ++dy) {
                for (int dx = 0; dx < 2; ++dx) {
                    const std::size_t cell = static_cast<std::size_t>(by + dy) * cells_x + (bx + dx);
                    for (int b = 0; b < BINS; ++b, ++n) {
                        block[n] = cell_hist[cell * BINS + b];
                        sumsq += block[n] * block[n];
                    }
                }
            }
            const double inv = 1.0 / std::sqrt(sumsq + 1e-6);
            for (int i = 0; i < 4 * BINS; ++i) out.push_back(block[i] * inv);
        }
    }
    return {std::move(out), "hog", dims_fingerprint("cell", cell_w, cell_h)};
}

// --- LPQ ---------------------------------------------------------------

namespace {

using Cplx = std::complex<double>;

// 1-D inverse DFT (small N; used only to derive spatial filters for the
// Gaussian-derivative mode).
std::vector<Cplx> idft(const std::vector<Cplx>& f) {
    const std::size_t n = f.size();
    std::vector<Cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        Cplx acc(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = 2.0 * M_PI * static_cast<double>(j) * static_cast<double>(k) /
                               static_cast<double>(n);
            acc += f[j] * Cplx(std::cos(ang), std::sin(ang));
        }
        out[k] = acc / static_cast<double>(n);
    }
    return out;
}

std::vector<Cplx> shift_vec(const std::vector<Cplx>& v, std::size_t by) {
    const std::size_t n = v.size();
    std::vector<Cplx> out(n);
    for (std::size_t i = 0; i < n; ++i) out[(i + by) % n] = v[i];
    return out;
}
std::vector<Cplx> fftshift1(const std::vector<Cplx>& v) { return shift_vec(v, v.size() / 2); }
std::vector<Cplx> ifftshift1(const std::vector<Cplx>& v) { return shift_vec(v, (v.size() + 1) / 2); }

// Scale a filter by the larger of |real|,|imag| of its largest-magnitude
// element (keeps phase; avoids tiny values).
void normalize_peak(std::vector<Cplx>& w) {
    double best = 0.0;
    Cplx best_el(0.0, 0.0);
    for (const Cplx& c : w) {
        if (std::abs(c) > best) {
            best = std::abs(c);
            best_el = c;
        }
    }
    const double m = std::max(std::abs(best_el.real()), std::abs(best_el.imag()));
    if (m > 0.0) {
        for (Cplx& c : w) c /= m;
    }
}

struct LpqFilters {
    std::vector<Cplx> w0, w1, w2;
};

LpqFilters lpq_1d_filters(int win, int freq_estim) {
    const int r = (win - 1) / 2;
    const double alpha = 1.0 / win;
    LpqFilters f;
    f.w0.resize(win);
    f.w1.resize(win);
    f.w2.resize(win);
    for (int j = 0; j < win; ++j) {
        const double x = j - r;
        f.w0[j] = Cplx(1.0, 0.0);
        const double ang = -2.0 * M_PI * x * alpha;
        f.w1[j] = Cplx(std::cos(ang), std::sin(ang));
        f.w2[j] = std::conj(f.w1[j]);
    }
    if (freq_estim == 2) {
        const double sigma_s = (win - 1) / 4.0;
        Cplx m1(0.0, 0.0), m2(0.0, 0.0);
        for (int j = 0; j < win; ++j) {
            const double x = j - r;
            const double g = std::exp(-0.5 * (x / sigma_s) * (x / sigma_s)) /
                             (std::sqrt(2.0 * M_PI) * sigma_s);
            f.w0[j] *= g;
            f.w1[j] *= g;
            f.w2[j] *= g;
            m1 += f.w1[j];
            m2 += f.w2[j];
        }
        m1 /= static_cast<double>(win);
        m2 /= static_cast<double>(win);
        for (int j = 0; j < win; ++j) {
            f.w1[j] -= m1;
            f.w2[j] -= m2;
        }
    } else if (freq_estim == 3) {
        const double sigma_a = 8.0 / (win - 1);
        std::vector<Cplx> g0(win), g1(win);
        for (int j = 0; j < win; ++j) {
            const double x = j - r;
            g0[j] = Cplx(std::exp(-x * x * 2.0 * sigma_a * sigma_a), 0.0);
            g1[j] = x > 0 ? Cplx(x * std::exp(-x * x * sigma_a * sigma_a), 0.0) : Cplx(0.0, 0.0);
        }
        double m0 = 0.0, m1 = 0.0;
        for (int j = 0; j < win; ++j) {
            m0 = std::max(m0, std::abs(g0[j]));
            m1 = std::max(m1, std::abs(g1[j]));
        }
        for (int j = 0; j < win; ++j) {
            g0[j] /= m0;
            g1[j] /= m1;
        }
        // Spatial-domain counterparts of the frequency definitions.
        const std::vector<Cplx> s0 = fftshift1(idft(ifftshift1(g0)));
        const std::vector<Cplx> s1 = fftshift1(idft(ifftshift1(g1)));
        for (int j = 0; j < win; ++j) {
            f.w0[j] = Cplx(s0[j].real(), 0.0);
            f.w1[j] = s1[j];
            f.w2[j] = std::conj(s1[j]);
        }
        normalize_peak(f.w0);
        normalize_peak(f.w1);
        normalize_peak(f.w2);
    } else if (freq_estim != 1) {
        throw InvalidArgument("freq_estim parameter must be 1, 2, or 3");
    }
    return f;
}

// Separable 'valid' true convolution: vertical filter fv then horizontal fh.
std::vector<Cplx> conv_valid_separable(const GrayImage& img, const std::vector<Cplx>& fv,
                                       const std::vector<Cplx>& fh, int& out_w, int& out_h) {
    const int L = static_cast<int>(fv.size());
    const int th = img.height - L + 1;
    out_w = img.width - L + 1;
    out_h = th;
    std::vector<Cplx> tmp(static_cast<std::size_t>(img.width) * th);
    for (int y = 0; y < th; ++y) {
        for (int x = 0; x < img.width; ++x) {
            Cplx acc(0.0, 0.0);
            for (int j = 0; j < L; ++j) {
                acc += fv[L - 1 - j] * img.at(x, y + j); // convolution flips the filter
            }
            tmp[static_cast<std::size_t>(y) * img.width + x] = acc;
        }
    }
    std::vector<Cplx> out(static_cast<std::size_t>(out_w) * out_h);
    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x) {
            Cplx acc(0.0, 0.0);
            for (int j = 0; j < L; ++j) {
                acc += fh[L - 1 - j] * tmp[static_cast<std::size_t>(y) * img.width + x + j];
            }
            out[static_cast<std::size_t>(y) * out_w + x] = acc;
        }
    }
    return out;
}

} // namespace

LpqResult lpq(const GrayImage& img, int win_size, bool decorr, int freq_estim, LpqMode mode) {
    if (win_size < 3 || win_size % 2 != 1) {
        throw InvalidArgument("window size must be an odd number greater than or equal to 3");
    }
    if (img.width < win_size || img.height < win_size) {
        throw InvalidArgument("image smaller than the analysis window");
    }
    const LpqFilters f = lpq_1d_filters(win_size, freq_estim);

    // Four frequency points: (w0', w1), (w1', w0), (w1', w1), (w1', w2).
    int fw = 0, fh = 0;
    std::array<std::vector<Cplx>, 4> resp;
    resp[0] = conv_valid_separable(img, f.w0, f.w1, fw, fh);
    resp[1] = conv_valid_separable(img, f.w1, f.w0, fw, fh);
    resp[2] = conv_valid_separable(img, f.w1, f.w1, fw, fh);
    resp[3] = conv_valid_separable(img, f.w1, f.w2, fw, fh);
    const std::size_t npix = static_cast<std::size_t>(fw) * fh;

    // 8 planes: real/imag of each response, in order.
    std::vector<std::array<double, 8>> planes(npix);
    for (std::size_t p = 0; p < npix; ++p) {
        for (int q = 0; q < 4; ++q) {
            planes[p][2 * q] = resp[q][p].real();
            planes[p][2 * q + 1] = resp[q][p].imag();
        }
    }

    if (decorr) {
        const int win = win_size;
        const int n = win * win;
        // Covariance of window positions, column-major position order.
        Eigen::MatrixXd C(n, n);
        constexpr double RHO = 0.90;
        for (int p1 = 0; p1 < n; ++p1) {
            const int a1 = p1 % win, b1 = p1 / win;
            for (int p2 = 0; p2 < n; ++p2) {
                const int a2 = p2 % win, b2 = p2 / win;
                C(p1, p2) = std::pow(RHO, std::hypot(static_cast<double>(a1 - a2),
                                                     static_cast<double>(b1 - b2)));
            }
        }
        // 2-D filters as outer products (column filter x row filter).
        const std::array<std::pair<const std::vector<Cplx>*, const std::vector<Cplx>*>, 4> prods =
            {{{&f.w0, &f.w1}, {&f.w1, &f.w0}, {&f.w1, &f.w1}, {&f.w1, &f.w2}}};
        Eigen::MatrixXd M(8, n);
        for (int q = 0; q < 4; ++q) {
            for (int p = 0; p < n; ++p) {
                const int a = p % win, b = p / win;
                const Cplx v = (*prods[q].first)[a] * (*prods[q].second)[b];
                M(2 * q, p) = v.real();
                M(2 * q + 1, p) = v.imag();
            }
        }
        const Eigen::MatrixXd D = M * C * M.transpose();
        Eigen::VectorXd adiag(8);
        adiag << 1.000007, 1.000006, 1.000005, 1.000004, 1.000003, 1.000002, 1.000001, 1.0;
        const Eigen::MatrixXd ada = adiag.asDiagonal() * D * adiag.asDiagonal();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(ada, Eigen::ComputeFullV);
        const Eigen::MatrixXd vt = svd.matrixV().transpose();
        for (std::size_t p = 0; p < npix; ++p) {
            std::array<double, 8> w{};
            for (int i = 0; i < 8; ++i) {
                for (int j = 0; j < 8; ++j) w[i] += vt(i, j) * planes[p][j];
            }
            planes[p] = w;
        }
    }

    // Sign quantization.  Responses that are zero up to round-off (e.g. a
    // constant image, where each filter sums the win-th roots of unity) must
    // not set bits.
    constexpr double QEPS = 1e-10;
    LpqResult res;
    res.codes = IntImage(fw, fh);
    for (std::size_t p = 0; p < npix; ++p) {
        int code = 0;
        for (int i = 0; i < 8; ++i) {
            if (planes[p][i] > QEPS) code |= 1 << i;
        }
        res.codes.data[p] = code;
    }

    if (mode == LpqMode::im) return res;

    std::vector<double> hist(256, 0.0);
    for (int code : res.codes.data) hist[code] += 1.0;
    if (mode == LpqMode::nh) {
        const double total = static_cast<double>(npix);
        for (double& v : hist) v /= total;
    }
    res.histogram = {std::move(hist), "lpq",
                     "win=" + std::to_string(win_size) + ",decorr=" + (decorr ? "1" : "0") +
                         ",fe=" + std::to_string(freq_estim)};
    return res;
}

FeatureVector lpq_features(const GrayImage& img, int win_size, bool decorr, int freq_estim) {
    return lpq(img, win_size, decorr, freq_estim, LpqMode::nh).histogram;
}

// --- Gabor -------------------------------------------------------------

GaborBank gabor_bank(int u, int v, int m, int n) {
    if (u < 1 || v < 1) throw InvalidArgument("bank needs at least one scale and orientation");
    if (m % 2 == 0 || n % 2 == 0 || m < 1 || n < 1) {
        throw InvalidArgument("gabor kernel dims must be odd");
    }
    constexpr double FMAX = 0.25;
    const double gama = std::sqrt(2.0), eta = std::sqrt(2.0);

    GaborBank bank;
    bank.scales = u;
    bank.orientations = v;
    bank.rows = m;
    bank.cols = n;
    bank.kernels.reserve(static_cast<std::size_t>(u) * v);
    for (int i = 1; i <= u; ++i) {
        const double fu = FMAX / std::pow(std::sqrt(2.0), i - 1);
        const double a2 = (fu / gama) * (fu / gama);
        const double b2 = (fu / eta) * (fu / eta);
        const double scale = fu * fu / (M_PI * gama * eta);
        for (int j = 1; j <= v; ++j) {
            const double theta = (static_cast<double>(j - 1) / v) * M_PI;
            const double ct = std::cos(theta), st = std::sin(theta);
            std::vector<std::complex<double>> k(static_cast<std::size_t>(m) * n);
            for (int row = 0; row < m; ++row) {
                const double xc = row - (m - 1) / 2.0; // first kernel axis = rows
                for (int col = 0; col < n; ++col) {
                    const double yc = col - (n - 1) / 2.0;
                    const double xp = xc * ct + yc * st;
                    const double yp = -xc * st + yc * ct;
                    const double env = scale * std::exp(-(a2 * xp * xp + b2 * yp * yp));
                    const double ang = 2.0 * M_PI * fu * xp;
                    k[static_cast<std::size_t>(row) * n + col] =
                        std::complex<double>(env * std::cos(ang), env * std::sin(ang));
                }
            }
            bank.kernels.push_back(std::move(k));
        }
    }
    return bank;
}

namespace {

// 'same' true convolution of a real image with a complex kernel, zero padded.
// The interior (full-overlap) region runs without bounds checks.
void conv_same_complex(const GrayImage& img, const std::vector<std::complex<double>>& kernel,
                       int km, int kn, std::vector<double>& out_mag) {
    const int w = img.width, h = img.height;
    const int cy = (km - 1) / 2, cx = (kn - 1) / 2;
    std::vector<double> kre(static_cast<std::size_t>(km) * kn), kim(kre.size());
    for (std::size_t i = 0; i < kernel.size(); ++i) {
        kre[i] = kernel[i].real();
        kim[i] = kernel[i].imag();
    }
    out_mag.assign(static_cast<std::size_t>(w) * h, 0.0);

    for (int y = 0; y < h; ++y) {
        const bool y_interior = (y >= cy) && (y + (km - 1 - cy) < h);
        for (int x = 0; x < w; ++x) {
            const bool interior = y_interior && (x >= cx) && (x + (kn - 1 - cx) < w);
            double re = 0.0, im = 0.0;
            if (interior) {
                for (int a = 0; a < km; ++a) {
                    const double* row = &img.data[static_cast<std::size_t>(y + cy - a) * w + (x + cx)];
                    const double* krow = &kre[static_cast<std::size_t>(a) * kn];
                    const double* kirow = &kim[static_cast<std::size_t>(a) * kn];
                    for (int b = 0; b < kn; ++b) {
                        const double v = row[-b];
                        re += krow[b] * v;
                        im += kirow[b] * v;
                    }
                }
            } else {
                for (int a = 0; a < km; ++a) {
                    const int sy = y + cy - a;
                    if (sy < 0 || sy >= h) continue;
                    for (int b = 0; b < kn; ++b) {
                        const int sx = x + cx - b;
                        if (sx < 0 || sx >= w) continue;
                        const double v = img.data[static_cast<std::size_t>(sy) * w + sx];
                        const std::size_t ki = static_cast<std::size_t>(a) * kn + b;
                        re += kre[ki] * v;
                        im += kim[ki] * v;
                    }
                }
            }
            out_mag[static_cast<std::size_t>(y) * w + x] = std::hypot(re, im);
        }
    }
}

} // namespace

FeatureVector gabor_features(const GrayImage& img, const GaborBank& bank, int d1, int d2) {
    if (d1 < 1 || d2 < 1 || img.height % d1 != 0 || img.width % d2 != 0) {
        throw InvalidArgument("d1 must divide image height and d2 image width");
    }
    if (img.empty()) throw ShapeError("gabor_features requires a non-empty image");
    const int rows_ds = img.height / d1;
    const int cols_ds = img.width / d2;
    const std::size_t block = static_cast<std::size_t>(rows_ds) * cols_ds;

    std::vector<double> out;
    out.reserve(block * bank.kernels.size());
    std::vector<double> mag;
    std::vector<double> ds(block);
    for (const auto& kernel : bank.kernels) {
        conv_same_complex(img, kernel, bank.rows, bank.cols, mag);
        // Keep every d1-th row / d2-th column (starting at the first), then
        // flatten column-major.
        std::size_t n = 0;
        for (int b = 0; b < cols_ds; ++b) {
            for (int a = 0; a < rows_ds; ++a) {
                ds[n++] = mag[static_cast<std::size_t>(a) * d1 * img.width + b * d2];
            }
        }
        double mean = 0.0;
        for (double v : ds) mean += v;
        mean /= static_cast<double>(block);
        double var = 0.0;
        for (double v : ds) var += (v - mean) * (v - mean);
        const double sd = std::sqrt(var / static_cast<double>(block)); // population std
        if (sd <= 1e-12) {
            out.insert(out.end(), block, 0.0); // zero-variance guard
        } else {
            for (double v : ds) out.push_back((v - mean) / sd);
        }
    }
    return {std::move(out), "gabor",
            "u=" + std::to_string(bank.scales) + ",v=" + std::to_string(bank.orientations) +
                ",k=" + std::to_string(bank.rows) + "x" + std::to_string(bank.cols) +
                ",d=" + std::to_string(d1) + "x" + std::to_string(d2)};
}

// --- Depth face ----------------------------------------------------------

GrayImage extract_depth_face(const GrayImage& depth, int crop_half_width, double side_trim) {
    if (depth.empty()) throw ShapeError("extract_depth_face requires a non-empty image");
    if (crop_half_width < 1) throw InvalidArgument("crop half-width must be >= 1");
    if (side_trim < 0.0 || side_trim >= 0.5) {
        throw InvalidArgument("side_trim must be in [0, 0.5)");
    }
    constexpr double BLACK_FLOOR = 30.0 / 255.0;

    // 1. Nose tip: darkest (= closest) pixel above the black-spot floor.
    int nx = -1, ny = -1;
    double best = 2.0;
    for (int y = 0; y < depth.height; ++y) {
        for (int x = 0; x < depth.width; ++x) {
            const double v = depth.at(x, y);
            if (v > BLACK_FLOOR && v < best) {
                best = v;
                nx = x;
                ny = y;
            }
        }
    }
    if (nx < 0) throw NoFaceFound("no pixel above the black-spot floor");

    // 2. Clamped square crop around the nose tip.
    const int x0 = std::max(0, nx - crop_half_width);
    const int x1 = std::min(depth.width - 1, nx + crop_half_width);
    const int y0 = std::max(0, ny - crop_half_width);
    const int y1 = std::min(depth.height - 1, ny + crop_half_width);
    GrayImage crop(x1 - x0 + 1, y1 - y0 + 1);
    for (int y = 0; y < crop.height; ++y) {
        for (int x = 0; x < crop.width; ++x) crop.at(x, y) = depth.at(x0 + x, y0 + y);
    }

    // 3. Ellipse from the second-order moments of the high-variation mask.
    const GrayImage sf = std_filter(crop, 5, 5);
    double mx = 0.0, my = 0.0;
    long count = 0;
    for (int y = 0; y < sf.height; ++y) {
        for (int x = 0; x < sf.width; ++x) {
            if (sf.at(x, y) > 0.02) {
                mx += x;
                my += y;
                ++count;
            }
        }
    }
    if (count == 0) throw NoFaceFound("no structure found inside the face crop");
    mx /= static_cast<double>(count);
    my /= static_cast<double>(count);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (int y = 0; y < sf.height; ++y) {
        for (int x = 0; x < sf.width; ++x) {
            if (sf.at(x, y) > 0.02) {
                sxx += (x - mx) * (x - mx);
                syy += (y - my) * (y - my);
                sxy += (x - mx) * (y - my);
            }
        }
    }
    sxx = sxx / static_cast<double>(count) + 1e-9;
    syy = syy / static_cast<double>(count) + 1e-9;
    sxy /= static_cast<double>(count);

    // 4. Zero pixels outside the 2-sigma ellipse (Mahalanobis distance > 2).
    const double det = sxx * syy - sxy * sxy;
    for (int y = 0; y < crop.height; ++y) {
        for (int x = 0; x < crop.width; ++x) {
            const double dx = x - mx, dy = y - my;
            const double md2 = (syy * dx * dx - 2.0 * sxy * dx * dy + sxx * dy * dy) / det;
            if (md2 > 4.0) crop.at(x, y) = 0.0;
        }
    }

    // 5. Trim a fraction from every side.
    const int tx = static_cast<int>(std::floor(side_trim * crop.width));
    const int ty = static_cast<int>(std::floor(side_trim * crop.height));
    GrayImage out(crop.width - 2 * tx, crop.height - 2 * ty);
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) out.at(x, y) = crop.at(x + tx, y + ty);
    }
    return out;
}

// --- FACS ---------------------------------------------------------------

std::string facs_expression(const std::set<int>& action_units) {
    static const std::pair<std::set<int>, const char*> table[] = {
        {{1, 2, 5, 25, 26}, "Surprise"},
        {{6, 12}, "Joy"},
        {{1, 15, 17}, "Sadness"},
        {{4, 7, 9, 10, 25}, "Anger"},
    };
    for (const auto& [aus, name] : table) {
        if (action_units == aus) return name;
    }
    return "Unknown";
}

} // namespace fer
