#include "fer/metaopt.hpp"

#include "fer/enhance.hpp"
#include "fer/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fer {

ClusterResult cluster_cost(const std::vector<double>& centers, int k, int d,
                           const std::vector<double>& X, int n) {
    if (k < 1 || n < 1 || d < 1) throw InvalidArgument("cluster_cost: empty input");
    if (static_cast<int>(centers.size()) != k * d || static_cast<int>(X.size()) != n * d) {
        throw ShapeError("cluster_cost: dimension mismatch");
    }
    ClusterResult res;
    res.assignments.resize(n);
    res.min_dists.resize(n);
    for (int i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (int c = 0; c < k; ++c) {
            double s = 0.0;
            for (int j = 0; j < d; ++j) {
                const double e = X[static_cast<std::size_t>(i) * d + j] -
                                 centers[static_cast<std::size_t>(c) * d + j];
                s += e * e;
            }
            if (s < best) {
                best = s;
                arg = c;
            }
        }
        res.assignments[i] = arg;
        res.min_dists[i] = std::sqrt(best);
        res.cost += res.min_dists[i];
    }
    return res;
}

int roulette_select(const std::vector<double>& weights, Rng& rng) {
    if (weights.empty()) throw InvalidArgument("roulette_select: empty weights");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw InvalidArgument("roulette_select: negative weight");
        sum += w;
    }
    if (sum <= 0.0) throw InvalidArgument("roulette_select: all weights zero");
    const double r = rng.uniform();
    double cum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        cum += weights[i] / sum;
        if (r <= cum) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1; // fp shortfall
}

// --- WDOA -------------------------------------------------------------------

namespace {

struct Candidate {
    std::vector<double> position;
    double cost = std::numeric_limits<double>::infinity();
    std::vector<int> assignments;
};

bool by_cost(const Candidate& a, const Candidate& b) { return a.cost < b.cost; }

} // namespace

WdoaResult wdoa_enhance(const GrayImage& img, int k, int max_it, int n_pop, std::uint64_t seed) {
    if (img.empty()) throw ShapeError("wdoa_enhance requires a non-empty image");
    if (k < 1 || max_it < 1 || n_pop < 2) {
        throw InvalidArgument("wdoa_enhance needs k >= 1, max_it >= 1, n_pop >= 2");
    }
    const std::vector<double>& X = img.data;
    const int n = static_cast<int>(X.size());
    const auto [mn, mx] = std::minmax_element(X.begin(), X.end());
    const double var_min = *mn, var_max = *mx;

    WdoaResult out;
    if (var_max <= var_min) { // flat image: degenerate bounds
        out.image = img;
        out.thresholds.assign(k, var_min);
        return out;
    }

    constexpr double DAMAGE_RATE = 0.3; // elite fraction kept from the old population
    constexpr double SNOUT_POWER = 0.8;
    constexpr double FLY_POWER = 0.003;

    Rng rng(seed);
    auto evaluate = [&](Candidate& c) {
        const ClusterResult r = cluster_cost(c.position, k, 1, X, n);
        c.cost = r.cost;
    };

    std::vector<Candidate> pop(n_pop);
    for (Candidate& c : pop) {
        c.position.resize(k);
        for (double& v : c.position) v = rng.uniform(var_min, var_max);
        evaluate(c);
    }
    std::sort(pop.begin(), pop.end(), by_cost);

    std::vector<double> mu(n_pop), mu_two(n_pop);
    for (int i = 0; i < n_pop; ++i) {
        mu[i] = 1.0 - static_cast<double>(i) / (n_pop - 1); // linspace(1, 0, nPop)
        mu_two[i] = 1.0 - mu[i];
    }

    for (int it = 0; it < max_it; ++it) {
        std::vector<Candidate> newpop = pop;
        for (int i = 0; i < n_pop; ++i) {
            for (int c = 0; c < k; ++c) {
                if (rng.uniform() <= mu_two[i]) {
                    std::vector<double> tmp = mu;
                    tmp[i] = 0.0;
                    if (std::accumulate(tmp.begin(), tmp.end(), 0.0) <= 0.0) continue;
                    const int j = roulette_select(tmp, rng);
                    newpop[i].position[c] =
                        pop[i].position[c] +
                        SNOUT_POWER * (pop[j].position[c] - pop[i].position[c] + FLY_POWER);
                }
            }
            for (double& v : newpop[i].position) v = std::clamp(v, var_min, var_max);
            evaluate(newpop[i]);
        }
        std::sort(newpop.begin(), newpop.end(), by_cost);
        const int n_keep = static_cast<int>(std::lround(DAMAGE_RATE * n_pop));
        std::vector<Candidate> merged;
        merged.reserve(n_pop);
        merged.insert(merged.end(), pop.begin(), pop.begin() + n_keep);
        merged.insert(merged.end(), newpop.begin(), newpop.begin() + (n_pop - n_keep));
        std::sort(merged.begin(), merged.end(), by_cost);
        pop = std::move(merged);
        out.history.push_back(pop.front().cost);
    }

    out.thresholds = pop.front().position;
    std::sort(out.thresholds.begin(), out.thresholds.end());
    // Gray-channel window of the best threshold set: (t1, t4) of the 2x3
    // adjustment matrix layout.
    const double lo = out.thresholds.front();
    const double hi = out.thresholds.size() >= 4 ? out.thresholds[3] : out.thresholds.back();
    out.image = stretch_window(img, lo, hi);
    return out;
}

// --- BEH --------------------------------------------------------------------

BehResult beh_segment(const RgbImage& img, int k, int max_it, int n_pop, std::uint64_t seed) {
    if (img.empty()) throw ShapeError("beh_segment requires a non-empty image");
    if (k < 2 || max_it < 1 || n_pop < 2) {
        throw InvalidArgument("beh_segment needs k >= 2, max_it >= 1, n_pop >= 2");
    }
    const int n = img.width * img.height;
    constexpr int D = 3;
    std::vector<double> X(static_cast<std::size_t>(n) * D);
    for (int i = 0; i < n; ++i) {
        X[static_cast<std::size_t>(i) * D + 0] = img.r[i];
        X[static_cast<std::size_t>(i) * D + 1] = img.g[i];
        X[static_cast<std::size_t>(i) * D + 2] = img.b[i];
    }
    double var_min[D], var_max[D], adjust[D];
    for (int c = 0; c < D; ++c) {
        double lo = X[c], hi = X[c];
        for (int i = 1; i < n; ++i) {
            lo = std::min(lo, X[static_cast<std::size_t>(i) * D + c]);
            hi = std::max(hi, X[static_cast<std::size_t>(i) * D + c]);
        }
        var_min[c] = lo;
        var_max[c] = hi;
        adjust[c] = 0.03 * (hi - lo);
    }

    constexpr double DAMAGE_RATE = 0.2; // elite fraction
    constexpr double PEAK_POWER = 0.8;
    constexpr double PYR = -0.2;
    constexpr double MUT_PROB = 0.1;

    Rng rng(seed);
    std::vector<double> shifted(static_cast<std::size_t>(k) * D);
    auto evaluate = [&](Candidate& c, bool shift) {
        // The listing evaluates the shifted position while storing the
        // unshifted one; initial candidates are evaluated unshifted.
        for (int r = 0; r < k; ++r) {
            for (int j = 0; j < D; ++j) {
                shifted[static_cast<std::size_t>(r) * D + j] =
                    c.position[static_cast<std::size_t>(r) * D + j] + (shift ? adjust[j] : 0.0);
            }
        }
        ClusterResult res = cluster_cost(shifted, k, D, X, n);
        c.cost = res.cost;
        c.assignments = std::move(res.assignments);
    };

    std::vector<Candidate> pop(n_pop);
    for (Candidate& c : pop) {
        c.position.resize(static_cast<std::size_t>(k) * D);
        for (int r = 0; r < k; ++r) {
            for (int j = 0; j < D; ++j) {
                c.position[static_cast<std::size_t>(r) * D + j] =
                    rng.uniform(var_min[j], var_max[j]);
            }
        }
        evaluate(c, false);
    }
    std::sort(pop.begin(), pop.end(), by_cost);

    std::vector<double> mu(n_pop), mu_two(n_pop);
    for (int i = 0; i < n_pop; ++i) {
        mu[i] = 1.0 - static_cast<double>(i) / (n_pop - 1);
        mu_two[i] = 1.0 - mu[i];
    }

    BehResult out;
    for (int it = 0; it < max_it; ++it) {
        std::vector<Candidate> newpop = pop;
        for (int i = 0; i < n_pop; ++i) {
            for (int r = 0; r < k; ++r) {
                for (int j = 0; j < D; ++j) {
                    const std::size_t e = static_cast<std::size_t>(r) * D + j;
                    if (rng.uniform() <= mu_two[i]) {
                        std::vector<double> tmp = mu;
                        tmp[i] = 0.0;
                        if (std::accumulate(tmp.begin(), tmp.end(), 0.0) > 0.0) {
                            const int don = roulette_select(tmp, rng);
                            newpop[i].position[e] =
                                pop[i].position[e] * PYR +
                                PEAK_POWER * (pop[don].position[e] - pop[i].position[e]);
                        }
                    }
                    if (rng.uniform() <= MUT_PROB) {
                        newpop[i].position[e] += PYR;
                    }
                    newpop[i].position[e] = std::clamp(newpop[i].position[e], var_min[j], var_max[j]);
                }
            }
            evaluate(newpop[i], true);
        }
        std::sort(newpop.begin(), newpop.end(), by_cost);
        const int n_keep = static_cast<int>(std::lround(DAMAGE_RATE * n_pop));
        std::vector<Candidate> merged;
        merged.reserve(n_pop);
        merged.insert(merged.end(), pop.begin(), pop.begin() + n_keep);
        merged.insert(merged.end(), newpop.begin(), newpop.begin() + (n_pop - n_keep));
        std::sort(merged.begin(), merged.end(), by_cost);
        pop = std::move(merged);
        out.history.push_back(pop.front().cost);
    }

    const Candidate& best = pop.front();
    out.quantized = RgbImage(img.width, img.height);
    out.labels = IntImage(img.width, img.height);
    for (int i = 0; i < n; ++i) {
        const int a = best.assignments[i];
        out.quantized.r[i] = clamp01(best.position[static_cast<std::size_t>(a) * D + 0]);
        out.quantized.g[i] = clamp01(best.position[static_cast<std::size_t>(a) * D + 1]);
        out.quantized.b[i] = clamp01(best.position[static_cast<std::size_t>(a) * D + 2]);
        out.labels.data[i] = a + 1;
    }
    return out;
}

// --- VAO --------------------------------------------------------------------

namespace {

// Sort order of the random keys; the first nf positions form the subset.
std::vector<int> keys_to_subset(const std::vector<double>& keys, int nf) {
    std::vector<int> order(keys.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return keys[a] < keys[b]; });
    std::vector<int> sel(order.begin(), order.begin() + nf);
    std::sort(sel.begin(), sel.end());
    return sel;
}

// Wrapper cost: weighted train/test softmax MSE of a small network, averaged
// over several runs.
double vao_cost(const LabeledDataset& ds, const std::vector<double>& keys, int nf,
                const VaoParams& p, Rng& rng) {
    const LabeledDataset sub = ds.select_columns(keys_to_subset(keys, nf));
    MlpParams mp;
    mp.hidden = p.wrapper_hidden;
    mp.trainer = "rprop";
    mp.epochs = p.wrapper_epochs;
    mp.train_frac = 0.70;
    mp.val_frac = 0.15;
    mp.test_frac = 0.15;

    auto split_mse = [&](const TrainedModel& m, const LabeledDataset& d,
                         const std::vector<int>& idx) {
        if (idx.empty()) return 0.0;
        const LabeledDataset part = d.subset(idx);
        const FeatureMatrix scores = predict_scores(m, part.X.data(), part.rows, part.cols);
        double mse = 0.0;
        for (int r = 0; r < part.rows; ++r) {
            for (int c = 0; c < scores.cols; ++c) {
                const double t = (c == part.y[r] - 1) ? 1.0 : 0.0;
                const double e = scores.at(r, c) - t;
                mse += e * e;
            }
        }
        return mse / (static_cast<double>(part.rows) * scores.cols);
    };

    double total = 0.0;
    for (int run = 0; run < p.wrapper_runs; ++run) {
        MlpHistory hist;
        const TrainedModel m = mlp_train(sub, mp, rng.next_seed(), &hist);
        std::vector<int> test_all = hist.test_idx;
        test_all.insert(test_all.end(), hist.val_idx.begin(), hist.val_idx.end());
        const double train_e = split_mse(m, sub, hist.train_idx);
        const double test_e = split_mse(m, sub, test_all);
        total += 0.8 * train_e + 0.2 * test_e;
    }
    return total / p.wrapper_runs;
}

} // namespace

VaoResult vao_select(const LabeledDataset& ds, int nf, const VaoParams& params,
                     std::uint64_t seed) {
    if (nf < 1 || nf > ds.cols) throw InvalidArgument("vao_select: nf outside 1..features");
    if (params.n_pop < 1 || params.max_it < 1) {
        throw InvalidArgument("vao_select: population and iterations must be >= 1");
    }
    const int nvar = ds.cols;
    const double range = params.var_max - params.var_min;
    const double delta = 0.05 * range;
    const double dmax = range * std::sqrt(static_cast<double>(nvar));

    Rng rng(seed);
    std::vector<Candidate> pop(params.n_pop);
    Candidate best;
    for (Candidate& c : pop) {
        c.position.resize(nvar);
        for (double& v : c.position) v = rng.uniform(params.var_min, params.var_max);
        c.cost = vao_cost(ds, c.position, nf, params, rng);
        if (c.cost <= best.cost || best.position.empty()) best = c;
    }

    VaoResult out;
    double mu = params.mu;
    for (int it = 0; it < params.max_it; ++it) {
        std::vector<Candidate> newpop(params.n_pop);
        for (int i = 0; i < params.n_pop; ++i) {
            for (int j = 0; j < params.n_pop; ++j) {
                if (pop[j].cost < pop[i].cost) {
                    double dist2 = 0.0;
                    for (int v = 0; v < nvar; ++v) {
                        const double e = pop[i].position[v] - pop[j].position[v];
                        dist2 += e * e;
                    }
                    const double rij = std::sqrt(dist2) / dmax;
                    const double beta = params.psi * std::exp(-params.omega *
                                                              std::pow(rij, params.lambda));
                    Candidate sol;
                    sol.position.resize(nvar);
                    for (int v = 0; v < nvar; ++v) {
                        const double attract =
                            beta * rng.uniform() * (pop[j].position[v] - pop[i].position[v]);
                        const double mut = mu * delta * rng.uniform(-1.0, 1.0);
                        sol.position[v] = std::clamp(pop[i].position[v] + attract + mut,
                                                     params.var_min, params.var_max);
                    }
                    sol.cost = vao_cost(ds, sol.position, nf, params, rng);
                    if (sol.cost <= newpop[i].cost) newpop[i] = sol;
                    if (sol.cost <= best.cost) best = sol;
                }
            }
        }
        std::vector<Candidate> merged = pop;
        for (Candidate& c : newpop) {
            if (!c.position.empty()) merged.push_back(std::move(c));
        }
        std::sort(merged.begin(), merged.end(), by_cost);
        merged.resize(params.n_pop);
        pop = std::move(merged);
        mu *= params.mu_damp;
        out.history.push_back(best.cost);
    }
    out.selected = keys_to_subset(best.position, nf);
    out.best_cost = best.cost;
    return out;
}

// --- NGN --------------------------------------------------------------------

NgnNetwork ngn_train(const std::vector<double>& X, int n, int d, const NgnParams& params,
                     std::uint64_t seed) {
    if (n < 1 || d < 1) throw InvalidArgument("ngn_train: empty data");
    if (params.N < 1) throw InvalidArgument("ngn_train: N must be >= 1");
    if (static_cast<int>(X.size()) != n * d) throw ShapeError("ngn_train: data size mismatch");
    const int N = params.N;
    const long tmax = params.tmax > 0 ? params.tmax
                                      : static_cast<long>(params.max_it) * n;

    Rng rng(seed);
    std::vector<int> order = rng.permutation(n); // shuffled once, reused each epoch

    std::vector<double> lo(d), hi(d);
    for (int j = 0; j < d; ++j) {
        lo[j] = hi[j] = X[j];
        for (int i = 1; i < n; ++i) {
            lo[j] = std::min(lo[j], X[static_cast<std::size_t>(i) * d + j]);
            hi[j] = std::max(hi[j], X[static_cast<std::size_t>(i) * d + j]);
        }
    }
    NgnNetwork net;
    net.N = N;
    net.d = d;
    net.w.resize(static_cast<std::size_t>(N) * d);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < d; ++j) {
            net.w[static_cast<std::size_t>(i) * d + j] = rng.uniform(lo[j], hi[j]);
        }
    }
    net.C.assign(static_cast<std::size_t>(N) * N, 0);
    net.t.assign(static_cast<std::size_t>(N) * N, 0.0);

    std::vector<std::pair<double, int>> rank(N);
    long tt = 0;
    for (int it = 0; it < params.max_it; ++it) {
        for (int s = 0; s < n; ++s) {
            const double* x = &X[static_cast<std::size_t>(order[s]) * d];
            for (int i = 0; i < N; ++i) {
                double dist2 = 0.0;
                for (int j = 0; j < d; ++j) {
                    const double e = x[j] - net.w[static_cast<std::size_t>(i) * d + j];
                    dist2 += e * e;
                }
                rank[i] = {dist2, i};
            }
            std::stable_sort(rank.begin(), rank.end());

            const double frac = static_cast<double>(tt) / static_cast<double>(tmax);
            const double eps = params.eps_i * std::pow(params.eps_f / params.eps_i, frac);
            const double lam = params.lam_i * std::pow(params.lam_f / params.lam_i, frac);
            const double T = params.T_i * std::pow(params.T_f / params.T_i, frac);

            for (int r = 0; r < N; ++r) {
                const int i = rank[r].second;
                const double g = eps * std::exp(-static_cast<double>(r) / lam);
                for (int j = 0; j < d; ++j) {
                    double& w = net.w[static_cast<std::size_t>(i) * d + j];
                    w += g * (x[j] - w);
                }
            }
            ++tt;

            if (N >= 2) {
                const int wi = rank[0].second, sj = rank[1].second;
                net.C[static_cast<std::size_t>(wi) * N + sj] = 1;
                net.C[static_cast<std::size_t>(sj) * N + wi] = 1;
                net.t[static_cast<std::size_t>(wi) * N + sj] = 0.0;
                net.t[static_cast<std::size_t>(sj) * N + wi] = 0.0;
                for (int j = 0; j < N; ++j) {
                    net.t[static_cast<std::size_t>(wi) * N + j] += 1.0;
                    net.t[static_cast<std::size_t>(j) * N + wi] += 1.0;
                }
                for (int j = 0; j < N; ++j) {
                    if (net.C[static_cast<std::size_t>(wi) * N + j] &&
                        net.t[static_cast<std::size_t>(wi) * N + j] > T) {
                        net.C[static_cast<std::size_t>(wi) * N + j] = 0;
                        net.C[static_cast<std::size_t>(j) * N + wi] = 0;
                    }
                }
            }
        }
    }
    return net;
}

NgnSegResult ngn_segment(const GrayImage& img, int N, const NgnParams& params,
                         std::uint64_t seed) {
    if (img.empty()) throw ShapeError("ngn_segment requires a non-empty image");
    if (N < 2) throw InvalidArgument("ngn_segment needs N >= 2");
    NgnParams p = params;
    p.N = N;
    const int n = img.width * img.height;
    const NgnNetwork net = ngn_train(img.data, n, 1, p, seed);

    NgnSegResult out;
    out.labels = IntImage(img.width, img.height);
    out.quantized = GrayImage(img.width, img.height);
    for (int i = 0; i < n; ++i) {
        const double v = img.data[i];
        int arg = 0;
        double best = std::abs(v - net.w[0]);
        for (int c = 1; c < N; ++c) {
            const double d = std::abs(v - net.w[c]);
            if (d < best) {
                best = d;
                arg = c;
            }
        }
        out.labels.data[i] = arg + 1;
        out.quantized.data[i] = clamp01(net.w[arg]);
    }
    return out;
}

} // namespace fer
