#include "fer/classify.hpp"

#include "fer/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fer {

namespace {

std::size_t net_size(const MlpNet& n) {
    return n.w1.size() + n.b1.size() + n.w2.size() + n.b2.size();
}

// Flat view over all parameters, in a fixed order.
double* param(MlpNet& n, std::size_t i) {
    if (i < n.w1.size()) return &n.w1[i];
    i -= n.w1.size();
    if (i < n.b1.size()) return &n.b1[i];
    i -= n.b1.size();
    if (i < n.w2.size()) return &n.w2[i];
    i -= n.w2.size();
    return &n.b2[i];
}

void forward_row(const MlpNet& net, const double* x, std::vector<double>& hidden,
                 std::vector<double>& out) {
    hidden.resize(net.hidden);
    out.resize(net.out);
    for (int i = 0; i < net.hidden; ++i) {
        double s = net.b1[i];
        const double* w = &net.w1[static_cast<std::size_t>(i) * net.in];
        for (int j = 0; j < net.in; ++j) s += w[j] * x[j];
        hidden[i] = std::tanh(s);
    }
    double mx = -1e300;
    for (int c = 0; c < net.out; ++c) {
        double s = net.b2[c];
        const double* w = &net.w2[static_cast<std::size_t>(c) * net.hidden];
        for (int i = 0; i < net.hidden; ++i) s += w[i] * hidden[i];
        out[c] = s;
        mx = std::max(mx, s);
    }
    double sum = 0.0;
    for (int c = 0; c < net.out; ++c) {
        out[c] = std::exp(out[c] - mx);
        sum += out[c];
    }
    for (int c = 0; c < net.out; ++c) out[c] /= sum;
}

} // namespace

MlpNet mlp_init(int in, int hidden, int out, Rng& rng) {
    if (in < 1 || hidden < 1 || out < 1) throw InvalidArgument("mlp layer sizes must be >= 1");
    MlpNet n;
    n.in = in;
    n.hidden = hidden;
    n.out = out;
    n.w1.resize(static_cast<std::size_t>(hidden) * in);
    n.b1.resize(hidden);
    n.w2.resize(static_cast<std::size_t>(out) * hidden);
    n.b2.resize(out);
    const double s1 = 1.0 / std::sqrt(static_cast<double>(in));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (double& w : n.w1) w = rng.uniform(-0.5, 0.5) * s1;
    for (double& w : n.b1) w = rng.uniform(-0.5, 0.5) * s1;
    for (double& w : n.w2) w = rng.uniform(-0.5, 0.5) * s2;
    for (double& w : n.b2) w = rng.uniform(-0.5, 0.5) * s2;
    return n;
}

std::vector<double> mlp_forward(const MlpNet& net, const double* X, int rows) {
    std::vector<double> out(static_cast<std::size_t>(rows) * net.out);
    std::vector<double> hidden, p;
    for (int r = 0; r < rows; ++r) {
        forward_row(net, &X[static_cast<std::size_t>(r) * net.in], hidden, p);
        std::copy(p.begin(), p.end(), out.begin() + static_cast<std::size_t>(r) * net.out);
    }
    return out;
}

double mlp_loss(const MlpNet& net, const double* X, int rows, const int* y) {
    double loss = 0.0;
    std::vector<double> hidden, p;
    for (int r = 0; r < rows; ++r) {
        forward_row(net, &X[static_cast<std::size_t>(r) * net.in], hidden, p);
        loss -= std::log(std::max(p[y[r] - 1], 1e-300));
    }
    return loss / rows;
}

void mlp_gradient(const MlpNet& net, const double* X, int rows, const int* y, MlpNet& grad) {
    grad.in = net.in;
    grad.hidden = net.hidden;
    grad.out = net.out;
    grad.w1.assign(net.w1.size(), 0.0);
    grad.b1.assign(net.b1.size(), 0.0);
    grad.w2.assign(net.w2.size(), 0.0);
    grad.b2.assign(net.b2.size(), 0.0);
    std::vector<double> hidden, p, dz1(net.hidden);
    const double inv_n = 1.0 / rows;
    for (int r = 0; r < rows; ++r) {
        const double* x = &X[static_cast<std::size_t>(r) * net.in];
        forward_row(net, x, hidden, p);
        // output delta: (softmax - onehot) / n
        for (int c = 0; c < net.out; ++c) {
            const double d = (p[c] - (c == y[r] - 1 ? 1.0 : 0.0)) * inv_n;
            grad.b2[c] += d;
            double* gw = &grad.w2[static_cast<std::size_t>(c) * net.hidden];
            for (int i = 0; i < net.hidden; ++i) gw[i] += d * hidden[i];
        }
        for (int i = 0; i < net.hidden; ++i) {
            double da = 0.0;
            for (int c = 0; c < net.out; ++c) {
                da += net.w2[static_cast<std::size_t>(c) * net.hidden + i] *
                      (p[c] - (c == y[r] - 1 ? 1.0 : 0.0)) * inv_n;
            }
            dz1[i] = da * (1.0 - hidden[i] * hidden[i]);
        }
        for (int i = 0; i < net.hidden; ++i) {
            grad.b1[i] += dz1[i];
            double* gw = &grad.w1[static_cast<std::size_t>(i) * net.in];
            for (int j = 0; j < net.in; ++j) gw[j] += dz1[i] * x[j];
        }
    }
}

TrainedModel mlp_train(const LabeledDataset& ds, const MlpParams& params, std::uint64_t seed,
                       MlpHistory* history) {
    if (params.hidden < 1) throw InvalidArgument("mlp hidden neuron count must be >= 1");
    if (params.epochs < 0) throw InvalidArgument("mlp epochs must be >= 0");
    if (params.trainer != "gd" && params.trainer != "rprop") {
        throw InvalidArgument("mlp trainer must be 'gd' or 'rprop'");
    }
    const double fsum = params.train_frac + params.val_frac + params.test_frac;
    if (params.train_frac < 0 || params.val_frac < 0 || params.test_frac < 0 ||
        std::abs(fsum - 1.0) > 1e-9) {
        throw InvalidArgument("mlp split fractions must be non-negative and sum to 1");
    }
    const int n = ds.rows;
    if (n < 1 || ds.cols < 1) throw InvalidArgument("empty dataset");

    Rng rng(seed);
    std::vector<int> order = rng.permutation(n);
    int n_train = static_cast<int>(std::lround(n * params.train_frac));
    int n_val = static_cast<int>(std::lround(n * params.val_frac));
    n_train = std::min(n_train, n);
    n_val = std::min(n_val, n - n_train);
    const int n_test = n - n_train - n_val;
    if (n_train < 1) throw InvalidArgument("mlp train split is empty");
    if (params.val_frac > 0 && n_val < 1) throw InvalidArgument("mlp validation split is empty");
    if (params.test_frac > 0 && n_test < 1) throw InvalidArgument("mlp test split is empty");

    std::vector<int> tr(order.begin(), order.begin() + n_train);
    std::vector<int> va(order.begin() + n_train, order.begin() + n_train + n_val);
    std::vector<int> te(order.begin() + n_train + n_val, order.end());

    const LabeledDataset train = ds.subset(tr);
    const LabeledDataset val = n_val > 0 ? ds.subset(va) : LabeledDataset{};

    MlpNet net = mlp_init(ds.cols, params.hidden, ds.num_classes, rng);
    const std::size_t np = net_size(net);

    MlpNet grad, prev_grad, step;
    prev_grad = net;
    step = net;
    for (std::size_t i = 0; i < np; ++i) {
        *param(prev_grad, i) = 0.0;
        *param(step, i) = 0.07; // rprop delta_0
    }
    constexpr double ETA_P = 1.2, ETA_M = 0.5, DMAX = 50.0, DMIN = 1e-6;

    MlpNet best = net;
    double best_val = 1e300;
    int best_epoch = 0;
    int bad = 0;
    MlpHistory hist;
    hist.train_idx = tr;
    hist.val_idx = va;
    hist.test_idx = te;

    for (int epoch = 1; epoch <= params.epochs; ++epoch) {
        mlp_gradient(net, train.X.data(), train.rows, train.y.data(), grad);
        if (params.trainer == "gd") {
            for (std::size_t i = 0; i < np; ++i) *param(net, i) -= params.lr * *param(grad, i);
        } else {
            // iRprop-: adapt per-weight steps by gradient sign agreement.
            for (std::size_t i = 0; i < np; ++i) {
                double g = *param(grad, i);
                const double gp = *param(prev_grad, i);
                double& d = *param(step, i);
                if (g * gp > 0.0) {
                    d = std::min(d * ETA_P, DMAX);
                } else if (g * gp < 0.0) {
                    d = std::max(d * ETA_M, DMIN);
                    g = 0.0; // skip the move after a sign flip
                }
                if (g > 0.0) {
                    *param(net, i) -= d;
                } else if (g < 0.0) {
                    *param(net, i) += d;
                }
                *param(prev_grad, i) = g;
            }
        }
        hist.train_loss.push_back(mlp_loss(net, train.X.data(), train.rows, train.y.data()));
        if (n_val > 0) {
            const double vl = mlp_loss(net, val.X.data(), val.rows, val.y.data());
            hist.val_loss.push_back(vl);
            if (vl < best_val) {
                best_val = vl;
                best = net;
                best_epoch = epoch;
                bad = 0;
            } else if (++bad >= params.patience) {
                break;
            }
        }
    }
    if (n_val > 0 && best_epoch > 0) {
        net = best;
        hist.best_epoch = best_epoch;
    } else {
        hist.best_epoch = static_cast<int>(hist.train_loss.size());
    }
    if (history) *history = std::move(hist);

    TrainedModel m;
    m.kind = "mlp";
    m.num_features = ds.cols;
    m.num_classes = ds.num_classes;
    m.mlp_hidden = params.hidden;
    m.w1 = std::move(net.w1);
    m.b1 = std::move(net.b1);
    m.w2 = std::move(net.w2);
    m.b2 = std::move(net.b2);
    return m;
}

} // namespace fer
