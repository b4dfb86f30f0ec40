#pragma once

#include <string>
#include <vector>

namespace fer {

// Dense samples x features matrix with optional per-row class labels (1..C).
struct FeatureMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;  // row-major
    std::vector<int> labels;   // empty, or size == rows

    FeatureMatrix() = default;
    FeatureMatrix(int r, int c)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
    bool has_labels() const { return !labels.empty(); }
};

// Horizontal concatenation in argument order.  All parts must have the same
// row count and at most one may carry labels (which propagate).
FeatureMatrix stack_features(const std::vector<FeatureMatrix>& parts);

// CSV: header row (f0..fN[,label]), '.' decimal, LF line endings, %.17g
// round-trip formatting so identical matrices serialize byte-identically.
void save_csv(const FeatureMatrix& m, const std::string& path);
FeatureMatrix load_csv(const std::string& path);

// Compact binary: magic, dims, little-endian 64-bit floats, labels.
void save_binary(const FeatureMatrix& m, const std::string& path);
FeatureMatrix load_binary(const std::string& path);

// Two-column CSV series (e.g. iteration/cost histories, ROC points).
struct CurveSeries {
    std::string x_name = "x";
    std::string y_name = "y";
    std::vector<double> x, y;
};

void save_curve(const CurveSeries& c, const std::string& path);
CurveSeries load_curve(const std::string& path);

} // namespace fer
