#include "fer/select.hpp"

#include "fer/error.hpp"
#include "fer/rng.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fer {

namespace {

constexpr int N_LAMBDA = 100;
constexpr double LAMBDA_MIN_RATIO = 1e-4;
// Convergence when every squared coefficient step falls below CD_TOL times
// the response variance (the customary scale-free criterion).
constexpr double CD_TOL = 1e-7;
constexpr long CD_MAX_SWEEPS = 100000;

struct Standardized {
    std::vector<double> z;     // column-major, standardized (zero-std cols left as 0)
    std::vector<double> mean;  // per column
    std::vector<double> sd;    // population std, 0 for constant columns
    std::vector<int> active;   // columns with nonzero std
    int rows = 0;

    const double* col(int j) const { return z.data() + static_cast<std::size_t>(j) * rows; }
};

Standardized standardize(const double* X, int rows, int cols) {
    Standardized s;
    s.rows = rows;
    s.z.assign(static_cast<std::size_t>(rows) * cols, 0.0);
    s.mean.assign(cols, 0.0);
    s.sd.assign(cols, 0.0);
    for (int j = 0; j < cols; ++j) {
        double m = 0.0;
        for (int i = 0; i < rows; ++i) m += X[static_cast<std::size_t>(i) * cols + j];
        m /= rows;
        double v = 0.0;
        for (int i = 0; i < rows; ++i) {
            const double d = X[static_cast<std::size_t>(i) * cols + j] - m;
            v += d * d;
        }
        const double sd = std::sqrt(v / rows);
        s.mean[j] = m;
        s.sd[j] = sd;
        if (sd > 0.0) {
            s.active.push_back(j);
            double* zj = s.z.data() + static_cast<std::size_t>(j) * rows;
            for (int i = 0; i < rows; ++i) {
                zj[i] = (X[static_cast<std::size_t>(i) * cols + j] - m) / sd;
            }
        }
    }
    return s;
}

// Cyclic coordinate descent at one lambda, warm started from gamma.  Columns
// are unit-variance, so each update is a plain soft threshold of
// rho_j = z_j' r / n + gamma_j.  Full sweeps alternate with cheap sweeps over
// the current support until a full sweep moves nothing.
void descend(const Standardized& s, int rows, std::vector<double>& gamma,
             std::vector<double>& resid, double lambda, double tol_d2) {
    const double n = rows;
    const auto update = [&](int j) -> double {
        const double old = gamma[j];
        const double* zj = s.col(j);
        double rho = 0.0;
        for (int i = 0; i < rows; ++i) rho += zj[i] * resid[i];
        rho = rho / n + old;
        const double next = rho > lambda ? rho - lambda : (rho < -lambda ? rho + lambda : 0.0);
        if (next != old) {
            const double d = old - next;
            for (int i = 0; i < rows; ++i) resid[i] += zj[i] * d;
            gamma[j] = next;
        }
        const double step = next - old;
        return step * step;
    };

    long sweeps = 0;
    std::vector<int> support;
    for (;;) {
        double max_d2 = 0.0;
        for (int j : s.active) max_d2 = std::max(max_d2, update(j));
        if (max_d2 <= tol_d2) return;
        if (++sweeps >= CD_MAX_SWEEPS) {
            throw ConvergenceError("lasso coordinate descent did not converge");
        }
        support.clear();
        for (int j : s.active) {
            if (gamma[j] != 0.0) support.push_back(j);
        }
        for (;;) {
            double d2 = 0.0;
            for (int j : support) d2 = std::max(d2, update(j));
            if (d2 <= tol_d2) break;
            if (++sweeps >= CD_MAX_SWEEPS) {
                throw ConvergenceError("lasso coordinate descent did not converge");
            }
        }
    }
}

struct PathFit {
    std::vector<std::vector<double>> beta; // original scale, per lambda
    std::vector<double> intercepts;
};

// Full regularization path on (X, y) for a given lambda grid.
PathFit fit_path(const double* X, int rows, int cols, const double* y,
                 const std::vector<double>& lambdas) {
    const Standardized s = standardize(X, rows, cols);
    double ybar = 0.0;
    for (int i = 0; i < rows; ++i) ybar += y[i];
    ybar /= rows;

    std::vector<double> gamma(cols, 0.0);
    std::vector<double> resid(rows);
    double var_y = 0.0;
    for (int i = 0; i < rows; ++i) {
        resid[i] = y[i] - ybar;
        var_y += resid[i] * resid[i];
    }
    var_y /= rows;
    const double tol_d2 = CD_TOL * std::max(var_y, 1e-12);

    PathFit fit;
    fit.beta.reserve(lambdas.size());
    fit.intercepts.reserve(lambdas.size());
    for (double lambda : lambdas) {
        descend(s, rows, gamma, resid, lambda, tol_d2);
        std::vector<double> b(cols, 0.0);
        double b0 = ybar;
        for (int j : s.active) {
            b[j] = gamma[j] / s.sd[j];
            b0 -= b[j] * s.mean[j];
        }
        fit.beta.push_back(std::move(b));
        fit.intercepts.push_back(b0);
    }
    return fit;
}

} // namespace

std::vector<int> LassoFit::selected_columns() const {
    std::vector<int> out;
    const std::vector<double>& b = beta.at(index_min_mse);
    for (int j = 0; j < static_cast<int>(b.size()); ++j) {
        if (b[j] != 0.0) out.push_back(j);
    }
    return out;
}

std::string LassoFit::to_json() const {
    nlohmann::json j;
    j["lambdas"] = lambdas;
    j["cv_mse"] = cv_mse;
    j["cv_mse_se"] = cv_mse_se;
    j["index_min_mse"] = index_min_mse;
    j["intercept"] = intercepts.at(index_min_mse);
    j["selected_columns"] = selected_columns();
    nlohmann::json coef = nlohmann::json::object();
    const std::vector<double>& b = beta.at(index_min_mse);
    for (int c : selected_columns()) coef[std::to_string(c)] = b[c];
    j["coefficients"] = coef;
    return j.dump(2);
}

LassoFit lasso_cv(const FeatureMatrix& X, const std::vector<double>& y, int k_folds,
                  std::uint64_t seed) {
    const int n = X.rows, p = X.cols;
    if (n != static_cast<int>(y.size())) throw ShapeError("lasso_cv: rows(X) != len(y)");
    if (k_folds < 2) throw InvalidArgument("lasso_cv needs at least 2 folds");
    if (n < k_folds) throw InvalidArgument("lasso_cv: fewer samples than folds");
    const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
    if (*ymin == *ymax) throw InvalidArgument("lasso_cv: constant response");

    // Global lambda grid from the full data.
    const Standardized s = standardize(X.data.data(), n, p);
    double ybar = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double lam_max = 0.0;
    for (int j : s.active) {
        const double* zj = s.col(j);
        double dot = 0.0;
        for (int i = 0; i < n; ++i) dot += zj[i] * (y[i] - ybar);
        lam_max = std::max(lam_max, std::abs(dot) / n);
    }
    if (lam_max == 0.0) {
        // response orthogonal to every predictor; the path is all-zero and CV
        // cannot distinguish lambdas
        throw InvalidArgument("lasso_cv: response uncorrelated with all predictors");
    }
    std::vector<double> lambdas(N_LAMBDA);
    for (int i = 0; i < N_LAMBDA; ++i) {
        lambdas[i] = lam_max * std::pow(LAMBDA_MIN_RATIO, static_cast<double>(i) / (N_LAMBDA - 1));
    }

    // Round-robin folds over shuffled row indices.
    Rng rng(seed);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::vector<std::vector<int>> folds(k_folds);
    for (int i = 0; i < n; ++i) folds[i % k_folds].push_back(order[i]);

    std::vector<std::vector<double>> fold_mse(k_folds, std::vector<double>(N_LAMBDA, 0.0));
    for (int f = 0; f < k_folds; ++f) {
        std::vector<int> tr;
        tr.reserve(n - folds[f].size());
        std::vector<char> in_test(n, 0);
        for (int i : folds[f]) in_test[i] = 1;
        for (int i = 0; i < n; ++i) {
            if (!in_test[i]) tr.push_back(i);
        }
        std::vector<double> Xtr(tr.size() * static_cast<std::size_t>(p));
        std::vector<double> ytr(tr.size());
        for (std::size_t r = 0; r < tr.size(); ++r) {
            std::copy_n(&X.data[static_cast<std::size_t>(tr[r]) * p], p, &Xtr[r * p]);
            ytr[r] = y[tr[r]];
        }
        const PathFit pf = fit_path(Xtr.data(), static_cast<int>(tr.size()), p, ytr.data(), lambdas);
        for (int li = 0; li < N_LAMBDA; ++li) {
            double sse = 0.0;
            for (int i : folds[f]) {
                double pred = pf.intercepts[li];
                for (int j = 0; j < p; ++j) {
                    pred += pf.beta[li][j] * X.at(i, j);
                }
                const double e = pred - y[i];
                sse += e * e;
            }
            fold_mse[f][li] = sse / static_cast<double>(folds[f].size());
        }
    }

    LassoFit fit;
    fit.lambdas = lambdas;
    fit.cv_mse.assign(N_LAMBDA, 0.0);
    fit.cv_mse_se.assign(N_LAMBDA, 0.0);
    for (int li = 0; li < N_LAMBDA; ++li) {
        double m = 0.0;
        for (int f = 0; f < k_folds; ++f) m += fold_mse[f][li];
        m /= k_folds;
        double v = 0.0;
        for (int f = 0; f < k_folds; ++f) v += (fold_mse[f][li] - m) * (fold_mse[f][li] - m);
        fit.cv_mse[li] = m;
        fit.cv_mse_se[li] = std::sqrt(v / (k_folds - 1)) / std::sqrt(static_cast<double>(k_folds));
    }
    fit.index_min_mse = static_cast<int>(
        std::min_element(fit.cv_mse.begin(), fit.cv_mse.end()) - fit.cv_mse.begin());

    PathFit full = fit_path(X.data.data(), n, p, y.data(), lambdas);
    fit.beta = std::move(full.beta);
    fit.intercepts = std::move(full.intercepts);
    return fit;
}

FeatureMatrix apply_selection(const FeatureMatrix& features, const LassoFit& fit) {
    if (fit.beta.empty() || static_cast<int>(fit.beta.front().size()) != features.cols) {
        throw ShapeError("apply_selection: fit feature count does not match matrix");
    }
    const std::vector<int> keep = fit.selected_columns();
    if (keep.empty()) {
        throw EmptySelection("no columns selected at the min-MSE lambda");
    }
    FeatureMatrix out;
    out.rows = features.rows;
    out.cols = static_cast<int>(keep.size());
    out.data.resize(static_cast<std::size_t>(out.rows) * out.cols);
    for (int i = 0; i < out.rows; ++i) {
        for (int c = 0; c < out.cols; ++c) {
            out.data[static_cast<std::size_t>(i) * out.cols + c] = features.at(i, keep[c]);
        }
    }
    out.labels = features.labels;
    return out;
}

PcaResult pca(const FeatureMatrix& X) {
    if (X.rows < 2) throw InvalidArgument("pca needs at least 2 rows");
    const int n = X.rows, p = X.cols;
    Eigen::MatrixXd M(n, p);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) M(i, j) = X.at(i, j);
    }
    const Eigen::RowVectorXd mu = M.colwise().mean();
    M.rowwise() -= mu;

    Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const int comp = static_cast<int>(svd.singularValues().size());

    PcaResult res;
    res.features = p;
    res.components = comp;
    res.means.assign(mu.data(), mu.data() + p);
    res.coeff.resize(static_cast<std::size_t>(p) * comp);
    res.scores.resize(static_cast<std::size_t>(n) * comp);
    res.latent.resize(comp);

    Eigen::MatrixXd V = svd.matrixV();
    Eigen::MatrixXd S = svd.matrixU() * svd.singularValues().asDiagonal();
    // Deterministic sign: the largest-magnitude loading of each component is
    // positive (first such entry on magnitude ties).
    for (int c = 0; c < comp; ++c) {
        int arg = 0;
        double best = -1.0;
        for (int f = 0; f < p; ++f) {
            if (std::abs(V(f, c)) > best) {
                best = std::abs(V(f, c));
                arg = f;
            }
        }
        if (V(arg, c) < 0.0) {
            V.col(c) = -V.col(c);
            S.col(c) = -S.col(c);
        }
    }
    for (int f = 0; f < p; ++f) {
        for (int c = 0; c < comp; ++c) res.coeff[static_cast<std::size_t>(f) * comp + c] = V(f, c);
    }
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < comp; ++c) res.scores[static_cast<std::size_t>(i) * comp + c] = S(i, c);
    }
    for (int c = 0; c < comp; ++c) {
        const double sv = svd.singularValues()(c);
        res.latent[c] = sv * sv / (n - 1);
    }
    return res;
}

} // namespace fer
