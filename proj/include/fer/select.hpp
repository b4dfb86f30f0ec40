#pragma once

#include "fer/featmat.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fer {

// L1-regularized least-squares path with k-fold cross validation.
struct LassoFit {
    std::vector<double> lambdas;           // descending, lambdas[0] = lambda_max
    std::vector<std::vector<double>> beta; // [lambda][feature], original scale
    std::vector<double> intercepts;        // per lambda
    std::vector<double> cv_mse;            // per lambda, mean over folds
    std::vector<double> cv_mse_se;         // standard error over folds
    int index_min_mse = 0;

    // Columns with a nonzero coefficient at the min-MSE lambda, ascending.
    std::vector<int> selected_columns() const;
    std::string to_json() const;
};

LassoFit lasso_cv(const FeatureMatrix& X, const std::vector<double>& y, int k_folds,
                  std::uint64_t seed);

// Keeps exactly the columns selected by the fit; labels pass through.
FeatureMatrix apply_selection(const FeatureMatrix& features, const LassoFit& fit);

struct PcaResult {
    int features = 0;
    int components = 0;
    std::vector<double> coeff;  // features x components, row-major, orthonormal columns
    std::vector<double> scores; // samples x components, row-major
    std::vector<double> latent; // component variances, non-increasing
    std::vector<double> means;  // per-feature column means

    double coeff_at(int f, int c) const { return coeff[static_cast<std::size_t>(f) * components + c]; }
    double score_at(int s, int c) const { return scores[static_cast<std::size_t>(s) * components + c]; }
};

PcaResult pca(const FeatureMatrix& X);

} // namespace fer
