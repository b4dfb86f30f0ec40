#pragma once

#include "fer/classify.hpp"
#include "fer/features.hpp"
#include "fer/image.hpp"
#include "fer/rng.hpp"

#include <cstdint>
#include <vector>

namespace fer {

struct ClusterResult {
    double cost = 0.0;            // sum of each point's distance to its nearest center
    std::vector<int> assignments; // nearest-center index per point, 0-based
    std::vector<double> min_dists;
};

// centers: k x d row-major, X: n x d row-major.
ClusterResult cluster_cost(const std::vector<double>& centers, int k, int d,
                           const std::vector<double>& X, int n);

// First index whose cumulative normalized weight reaches a uniform draw.
int roulette_select(const std::vector<double>& weights, Rng& rng);

struct WdoaResult {
    GrayImage image;
    std::vector<double> history;    // best cost per iteration
    std::vector<double> thresholds; // sorted best position
};

WdoaResult wdoa_enhance(const GrayImage& img, int k = 6, int max_it = 100, int n_pop = 10,
                        std::uint64_t seed = 0);

struct BehResult {
    RgbImage quantized;
    IntImage labels; // 1..k
    std::vector<double> history;
};

BehResult beh_segment(const RgbImage& img, int k = 5, int max_it = 200, int n_pop = 20,
                      std::uint64_t seed = 0);

struct VaoParams {
    double omega = 5.0;
    double psi = 4.0;
    double lambda = 2.0;
    double mu = 0.2;
    double mu_damp = 0.98;
    int n_pop = 3;
    int max_it = 50;
    double var_min = -10.0;
    double var_max = 10.0;
    int wrapper_hidden = 10;
    int wrapper_epochs = 100;
    int wrapper_runs = 3;
};

struct VaoResult {
    std::vector<int> selected; // ascending column indices, size nf
    std::vector<double> history;
    double best_cost = 0.0;
};

VaoResult vao_select(const LabeledDataset& ds, int nf, const VaoParams& params,
                     std::uint64_t seed);

struct NgnParams {
    int N = 8;
    int max_it = 10;
    long tmax = 0; // 0 means max_it * n_samples
    double eps_i = 0.3, eps_f = 0.02;
    double lam_i = 2.0, lam_f = 0.1;
    double T_i = 5.0, T_f = 10.0;
};

struct NgnNetwork {
    int N = 0, d = 0;
    std::vector<double> w;        // N x d codebooks
    std::vector<std::uint8_t> C;  // N x N links
    std::vector<double> t;        // N x N link ages
};

NgnNetwork ngn_train(const std::vector<double>& X, int n, int d, const NgnParams& params,
                     std::uint64_t seed);

struct NgnSegResult {
    IntImage labels; // 1..N
    GrayImage quantized;
};

NgnSegResult ngn_segment(const GrayImage& img, int N, const NgnParams& params,
                         std::uint64_t seed);

} // namespace fer
