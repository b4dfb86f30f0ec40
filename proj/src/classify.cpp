#include "fer/classify.hpp"

#include "fer/error.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace fer {

namespace {

void check_dataset(const LabeledDataset& ds) {
    if (ds.rows < 1 || ds.cols < 1) throw InvalidArgument("empty dataset");
    if (static_cast<int>(ds.y.size()) != ds.rows) throw ShapeError("label count != rows");
    if (ds.num_classes < 1) throw InvalidArgument("dataset has no classes");
    std::vector<char> seen(ds.num_classes + 1, 0);
    for (int c : ds.y) {
        if (c < 1 || c > ds.num_classes) throw InvalidArgument("label outside 1..C");
        seen[c] = 1;
    }
    for (int c = 1; c <= ds.num_classes; ++c) {
        if (!seen[c]) throw InvalidArgument("class " + std::to_string(c) + " has no samples");
    }
}

void require_multiclass(const LabeledDataset& ds, const char* algo) {
    bool multi = false;
    for (int c : ds.y) {
        if (c != ds.y.front()) {
            multi = true;
            break;
        }
    }
    if (!multi) throw InvalidArgument(std::string(algo) + " requires more than one class");
}

void check_features(const TrainedModel& m, int cols) {
    if (cols != m.num_features) throw ShapeError("feature count does not match the model");
}

int argmax_smallest(const double* v, int n) {
    int best = 0;
    for (int i = 1; i < n; ++i) {
        if (v[i] > v[best]) best = i; // strict: ties go to the smaller index
    }
    return best;
}

void softmax_inplace(double* v, int n) {
    double mx = v[0];
    for (int i = 1; i < n; ++i) mx = std::max(mx, v[i]);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        v[i] = std::exp(v[i] - mx);
        sum += v[i];
    }
    for (int i = 0; i < n; ++i) v[i] /= sum;
}

} // namespace

LabeledDataset LabeledDataset::subset(const std::vector<int>& idx) const {
    LabeledDataset out;
    out.rows = static_cast<int>(idx.size());
    out.cols = cols;
    out.num_classes = num_classes;
    out.X.resize(static_cast<std::size_t>(out.rows) * cols);
    out.y.resize(out.rows);
    for (int r = 0; r < out.rows; ++r) {
        std::copy_n(&X[static_cast<std::size_t>(idx[r]) * cols], cols,
                    &out.X[static_cast<std::size_t>(r) * cols]);
        out.y[r] = y[idx[r]];
    }
    return out;
}

LabeledDataset LabeledDataset::select_columns(const std::vector<int>& cols_keep) const {
    LabeledDataset out;
    out.rows = rows;
    out.cols = static_cast<int>(cols_keep.size());
    out.num_classes = num_classes;
    out.y = y;
    out.X.resize(static_cast<std::size_t>(rows) * out.cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < out.cols; ++c) {
            out.X[static_cast<std::size_t>(r) * out.cols + c] = at(r, cols_keep[c]);
        }
    }
    return out;
}

LabeledDataset make_dataset(const FeatureMatrix& fm) {
    if (!fm.has_labels()) throw InvalidArgument("feature matrix carries no labels");
    LabeledDataset ds;
    ds.rows = fm.rows;
    ds.cols = fm.cols;
    ds.X = fm.data;
    ds.y = fm.labels;
    ds.num_classes = *std::max_element(fm.labels.begin(), fm.labels.end());
    check_dataset(ds);
    return ds;
}

Partition holdout_split(const LabeledDataset& ds, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw InvalidArgument("test fraction must be in (0,1)");
    }
    const int n = ds.rows;
    const int n_test = static_cast<int>(std::lround(n * test_fraction));
    if (n_test < 1 || n_test >= n) throw InvalidArgument("holdout split leaves an empty side");
    Rng rng(seed);
    std::vector<int> order = rng.permutation(n);
    Partition p;
    p.test.assign(order.begin(), order.begin() + n_test);
    p.train.assign(order.begin() + n_test, order.end());
    return p;
}

Partition kfold_split(const LabeledDataset& ds, int k, std::uint64_t seed) {
    if (k < 2) throw InvalidArgument("k-fold needs k >= 2");
    if (k > ds.rows) throw InvalidArgument("more folds than samples");
    Rng rng(seed);
    std::vector<int> order = rng.permutation(ds.rows);
    Partition p;
    p.folds.assign(k, {});
    for (int i = 0; i < ds.rows; ++i) p.folds[i % k].push_back(order[i]);
    return p;
}

// --- training -------------------------------------------------------------

TrainedModel train_knn(const LabeledDataset& ds, int k) {
    check_dataset(ds);
    require_multiclass(ds, "knn");
    if (k < 1) throw InvalidArgument("knn needs k >= 1");
    TrainedModel m;
    m.kind = "knn";
    m.num_features = ds.cols;
    m.num_classes = ds.num_classes;
    m.knn_k = k;
    m.knn_X = ds.X;
    m.knn_y = ds.y;
    return m;
}

TrainedModel train_gnb(const LabeledDataset& ds) {
    check_dataset(ds);
    TrainedModel m;
    m.kind = "gnb";
    m.num_features = ds.cols;
    m.num_classes = ds.num_classes;
    const int C = ds.num_classes, d = ds.cols;
    m.gnb_priors.assign(C, 0.0);
    m.gnb_means.assign(static_cast<std::size_t>(C) * d, 0.0);
    m.gnb_vars.assign(static_cast<std::size_t>(C) * d, 0.0);
    std::vector<long> counts(C, 0);
    for (int i = 0; i < ds.rows; ++i) {
        const int c = ds.y[i] - 1;
        ++counts[c];
        for (int j = 0; j < d; ++j) m.gnb_means[static_cast<std::size_t>(c) * d + j] += ds.at(i, j);
    }
    for (int c = 0; c < C; ++c) {
        m.gnb_priors[c] = static_cast<double>(counts[c]) / ds.rows;
        if (counts[c] > 0) {
            for (int j = 0; j < d; ++j) m.gnb_means[static_cast<std::size_t>(c) * d + j] /= counts[c];
        }
    }
    for (int i = 0; i < ds.rows; ++i) {
        const int c = ds.y[i] - 1;
        for (int j = 0; j < d; ++j) {
            const double e = ds.at(i, j) - m.gnb_means[static_cast<std::size_t>(c) * d + j];
            m.gnb_vars[static_cast<std::size_t>(c) * d + j] += e * e;
        }
    }
    for (int c = 0; c < C; ++c) {
        for (int j = 0; j < d; ++j) {
            double v = counts[c] > 0 ? m.gnb_vars[static_cast<std::size_t>(c) * d + j] / counts[c] : 0.0;
            m.gnb_vars[static_cast<std::size_t>(c) * d + j] = std::max(v, 1e-9);
        }
    }
    return m;
}

namespace {

struct CartBuilder {
    const LabeledDataset& ds;
    int max_depth;
    int min_leaf;
    std::vector<TrainedModel::CartNode> nodes;

    double gini(const std::vector<long>& counts, long total) const {
        if (total == 0) return 0.0;
        double g = 1.0;
        for (long c : counts) {
            const double p = static_cast<double>(c) / total;
            g -= p * p;
        }
        return g;
    }

    int build(std::vector<int> idx, int depth) {
        const int C = ds.num_classes;
        std::vector<long> counts(C, 0);
        for (int i : idx) ++counts[ds.y[i] - 1];
        const long total = static_cast<long>(idx.size());

        TrainedModel::CartNode node;
        node.dist.assign(C, 0.0);
        for (int c = 0; c < C; ++c) node.dist[c] = static_cast<double>(counts[c]) / total;
        node.leaf_class =
            1 + static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());

        const bool pure = *std::max_element(counts.begin(), counts.end()) == total;
        if (pure || (max_depth > 0 && depth >= max_depth) ||
            total < 2 * static_cast<long>(min_leaf)) {
            nodes.push_back(std::move(node));
            return static_cast<int>(nodes.size()) - 1;
        }

        // Exhaustive Gini search over midpoints of sorted unique values.
        double best_gain = -1.0;
        int best_feat = -1;
        double best_thr = 0.0;
        const double parent_g = gini(counts, total);
        std::vector<std::pair<double, int>> vals(idx.size());
        std::vector<long> left_counts(C);
        for (int j = 0; j < ds.cols; ++j) {
            for (std::size_t r = 0; r < idx.size(); ++r) {
                vals[r] = {ds.at(idx[r], j), ds.y[idx[r]] - 1};
            }
            std::sort(vals.begin(), vals.end());
            std::fill(left_counts.begin(), left_counts.end(), 0L);
            long nl = 0;
            for (std::size_t r = 0; r + 1 < vals.size(); ++r) {
                ++left_counts[vals[r].second];
                ++nl;
                if (vals[r].first == vals[r + 1].first) continue;
                const long nr = total - nl;
                if (nl < min_leaf || nr < min_leaf) continue;
                double gl = 1.0, gr = 1.0;
                for (int c = 0; c < C; ++c) {
                    const double pl = static_cast<double>(left_counts[c]) / nl;
                    const double pr = static_cast<double>(counts[c] - left_counts[c]) / nr;
                    gl -= pl * pl;
                    gr -= pr * pr;
                }
                const double gain =
                    parent_g - (static_cast<double>(nl) / total) * gl -
                    (static_cast<double>(nr) / total) * gr;
                if (gain > best_gain + 1e-15) {
                    best_gain = gain;
                    best_feat = j;
                    best_thr = 0.5 * (vals[r].first + vals[r + 1].first);
                }
            }
        }
        if (best_feat < 0 || best_gain <= 0.0) {
            nodes.push_back(std::move(node));
            return static_cast<int>(nodes.size()) - 1;
        }

        std::vector<int> li, ri;
        for (int i : idx) {
            (ds.at(i, best_feat) <= best_thr ? li : ri).push_back(i);
        }
        node.feature = best_feat;
        node.threshold = best_thr;
        nodes.push_back(std::move(node));
        const int self = static_cast<int>(nodes.size()) - 1;
        const int l = build(std::move(li), depth + 1);
        const int r = build(std::move(ri), depth + 1);
        nodes[self].left = l;
        nodes[self].right = r;
        return self;
    }
};

} // namespace

TrainedModel train_cart(const LabeledDataset& ds, int max_depth, int min_leaf) {
    check_dataset(ds);
    require_multiclass(ds, "cart");
    if (min_leaf < 1) throw InvalidArgument("min_leaf must be >= 1");
    TrainedModel m;
    m.kind = "cart";
    m.num_features = ds.cols;
    m.num_classes = ds.num_classes;
    CartBuilder b{ds, max_depth, min_leaf, {}};
    std::vector<int> all(ds.rows);
    std::iota(all.begin(), all.end(), 0);
    b.build(std::move(all), 0);
    m.tree = std::move(b.nodes);
    return m;
}

TrainedModel train_lda(const LabeledDataset& ds, double ridge) {
    check_dataset(ds);
    require_multiclass(ds, "lda");
    const int C = ds.num_classes, d = ds.cols, n = ds.rows;
    TrainedModel m;
    m.kind = "lda";
    m.num_features = d;
    m.num_classes = C;
    m.lda_means.assign(static_cast<std::size_t>(C) * d, 0.0);
    m.lda_logpriors.assign(C, 0.0);
    std::vector<long> counts(C, 0);
    for (int i = 0; i < n; ++i) {
        const int c = ds.y[i] - 1;
        ++counts[c];
        for (int j = 0; j < d; ++j) m.lda_means[static_cast<std::size_t>(c) * d + j] += ds.at(i, j);
    }
    for (int c = 0; c < C; ++c) {
        for (int j = 0; j < d; ++j) m.lda_means[static_cast<std::size_t>(c) * d + j] /= counts[c];
        m.lda_logpriors[c] = std::log(static_cast<double>(counts[c]) / n);
    }
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < n; ++i) {
        const int c = ds.y[i] - 1;
        Eigen::VectorXd e(d);
        for (int j = 0; j < d; ++j) e(j) = ds.at(i, j) - m.lda_means[static_cast<std::size_t>(c) * d + j];
        S += e * e.transpose();
    }
    S /= std::max(1, n - C); // pooled within-class covariance
    S += ridge * Eigen::MatrixXd::Identity(d, d);
    const Eigen::MatrixXd inv = S.llt().solve(Eigen::MatrixXd::Identity(d, d));
    m.lda_icov.resize(static_cast<std::size_t>(d) * d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) m.lda_icov[static_cast<std::size_t>(i) * d + j] = inv(i, j);
    }
    return m;
}

// --- prediction -------------------------------------------------------------

namespace {

void score_row(const TrainedModel& m, const double* x, double* out) {
    const int C = m.num_classes, d = m.num_features;
    if (m.kind == "knn") {
        const int n = static_cast<int>(m.knn_y.size());
        const int k = std::min(m.knn_k, n);
        std::vector<std::pair<double, int>> dist(n);
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < d; ++j) {
                const double e = m.knn_X[static_cast<std::size_t>(i) * d + j] - x[j];
                s += e * e;
            }
            dist[i] = {s, i};
        }
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
        std::fill(out, out + C, 0.0);
        for (int i = 0; i < k; ++i) out[m.knn_y[dist[i].second] - 1] += 1.0 / k;
    } else if (m.kind == "gnb") {
        for (int c = 0; c < C; ++c) {
            double lp = std::log(std::max(m.gnb_priors[c], 1e-300));
            for (int j = 0; j < d; ++j) {
                const double mu = m.gnb_means[static_cast<std::size_t>(c) * d + j];
                const double var = m.gnb_vars[static_cast<std::size_t>(c) * d + j];
                lp += -0.5 * std::log(2.0 * M_PI * var) - (x[j] - mu) * (x[j] - mu) / (2.0 * var);
            }
            out[c] = lp;
        }
        softmax_inplace(out, C);
    } else if (m.kind == "cart") {
        int node = 0;
        while (m.tree[node].feature >= 0) {
            node = x[m.tree[node].feature] <= m.tree[node].threshold ? m.tree[node].left
                                                                     : m.tree[node].right;
        }
        std::copy(m.tree[node].dist.begin(), m.tree[node].dist.end(), out);
    } else if (m.kind == "lda") {
        for (int c = 0; c < C; ++c) {
            const double* mu = &m.lda_means[static_cast<std::size_t>(c) * d];
            // delta_c(x) = x' S^-1 mu - mu' S^-1 mu / 2 + log prior
            double xm = 0.0, mm = 0.0;
            for (int i = 0; i < d; ++i) {
                double Simu = 0.0;
                for (int j = 0; j < d; ++j) Simu += m.lda_icov[static_cast<std::size_t>(i) * d + j] * mu[j];
                xm += x[i] * Simu;
                mm += mu[i] * Simu;
            }
            out[c] = xm - 0.5 * mm + m.lda_logpriors[c];
        }
        softmax_inplace(out, C);
    } else if (m.kind == "mlp") {
        const int h = m.mlp_hidden;
        std::vector<double> a(h);
        for (int i = 0; i < h; ++i) {
            double s = m.b1[i];
            for (int j = 0; j < d; ++j) s += m.w1[static_cast<std::size_t>(i) * d + j] * x[j];
            a[i] = std::tanh(s);
        }
        for (int c = 0; c < C; ++c) {
            double s = m.b2[c];
            for (int i = 0; i < h; ++i) s += m.w2[static_cast<std::size_t>(c) * h + i] * a[i];
            out[c] = s;
        }
        softmax_inplace(out, C);
    } else {
        throw InvalidArgument("unknown model kind '" + m.kind + "'");
    }
}

} // namespace

FeatureMatrix predict_scores(const TrainedModel& model, const double* X, int rows, int cols) {
    check_features(model, cols);
    FeatureMatrix out;
    out.rows = rows;
    out.cols = model.num_classes;
    out.data.resize(static_cast<std::size_t>(rows) * model.num_classes);
    for (int r = 0; r < rows; ++r) {
        score_row(model, &X[static_cast<std::size_t>(r) * cols],
                  &out.data[static_cast<std::size_t>(r) * model.num_classes]);
    }
    return out;
}

FeatureMatrix predict_scores(const TrainedModel& model, const FeatureMatrix& fm) {
    return predict_scores(model, fm.data.data(), fm.rows, fm.cols);
}

std::vector<int> predict(const TrainedModel& model, const double* X, int rows, int cols) {
    const FeatureMatrix s = predict_scores(model, X, rows, cols);
    std::vector<int> out(rows);
    for (int r = 0; r < rows; ++r) {
        out[r] = 1 + argmax_smallest(&s.data[static_cast<std::size_t>(r) * s.cols], s.cols);
    }
    return out;
}

std::vector<int> predict(const TrainedModel& model, const FeatureMatrix& fm) {
    return predict(model, fm.data.data(), fm.rows, fm.cols);
}

std::vector<int> predict(const TrainedModel& model, const LabeledDataset& ds) {
    return predict(model, ds.X.data(), ds.rows, ds.cols);
}

// --- evaluation -------------------------------------------------------------

long ConfusionMatrix::total() const {
    long t = 0;
    for (long c : counts) t += c;
    return t;
}

double ConfusionMatrix::accuracy() const {
    const long t = total();
    if (t == 0) return 0.0;
    long diag = 0;
    for (int c = 0; c < num_classes; ++c) diag += at(c, c);
    return static_cast<double>(diag) / static_cast<double>(t);
}

std::vector<double> ConfusionMatrix::precision() const {
    std::vector<double> out(num_classes, 0.0);
    for (int p = 0; p < num_classes; ++p) {
        long col = 0;
        for (int t = 0; t < num_classes; ++t) col += at(t, p);
        out[p] = col > 0 ? static_cast<double>(at(p, p)) / col : 0.0;
    }
    return out;
}

std::vector<double> ConfusionMatrix::recall() const {
    std::vector<double> out(num_classes, 0.0);
    for (int t = 0; t < num_classes; ++t) {
        long row = 0;
        for (int p = 0; p < num_classes; ++p) row += at(t, p);
        out[t] = row > 0 ? static_cast<double>(at(t, t)) / row : 0.0;
    }
    return out;
}

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred, int C) {
    if (y_true.size() != y_pred.size()) throw InvalidArgument("confusion: length mismatch");
    if (C < 1) throw InvalidArgument("confusion: C must be >= 1");
    ConfusionMatrix cm;
    cm.num_classes = C;
    cm.counts.assign(static_cast<std::size_t>(C) * C, 0);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const int t = y_true[i], p = y_pred[i];
        if (t < 1 || t > C || p < 1 || p > C) throw InvalidArgument("confusion: label out of range");
        ++cm.counts[static_cast<std::size_t>(t - 1) * C + (p - 1)];
    }
    return cm;
}

std::vector<std::pair<double, double>> roc_points(const std::vector<double>& scores,
                                                  const std::vector<int>& y_true) {
    if (scores.size() != y_true.size() || scores.empty()) {
        throw InvalidArgument("roc_points: bad input lengths");
    }
    long pos = 0, neg = 0;
    for (int v : y_true) (v ? pos : neg) += 1;
    if (pos == 0 || neg == 0) throw InvalidArgument("roc_points: both classes must be present");

    std::vector<double> thr = scores;
    std::sort(thr.begin(), thr.end(), std::greater<>());
    thr.erase(std::unique(thr.begin(), thr.end()), thr.end());

    std::vector<std::pair<double, double>> pts;
    pts.emplace_back(0.0, 0.0);
    for (double t : thr) {
        long tp = 0, fp = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (scores[i] >= t) (y_true[i] ? tp : fp) += 1;
        }
        const std::pair<double, double> p{static_cast<double>(fp) / neg,
                                          static_cast<double>(tp) / pos};
        if (p != pts.back()) pts.push_back(p);
    }
    if (pts.back() != std::make_pair(1.0, 1.0)) pts.emplace_back(1.0, 1.0);
    return pts;
}

double roc_auc(const std::vector<std::pair<double, double>>& pts) {
    double auc = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        auc += (pts[i].first - pts[i - 1].first) * 0.5 * (pts[i].second + pts[i - 1].second);
    }
    return auc;
}

double loss_01(const TrainedModel& model, const LabeledDataset& ds) {
    const std::vector<int> pred = predict(model, ds);
    long wrong = 0;
    for (int i = 0; i < ds.rows; ++i) {
        if (pred[i] != ds.y[i]) ++wrong;
    }
    return static_cast<double>(wrong) / ds.rows;
}

// --- serialization ---------------------------------------------------------

std::string TrainedModel::to_json() const {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["kind"] = kind;
    j["num_features"] = num_features;
    j["num_classes"] = num_classes;
    if (kind == "knn") {
        j["k"] = knn_k;
        j["X"] = knn_X;
        j["y"] = knn_y;
    } else if (kind == "gnb") {
        j["priors"] = gnb_priors;
        j["means"] = gnb_means;
        j["vars"] = gnb_vars;
    } else if (kind == "cart") {
        nlohmann::json nodes = nlohmann::json::array();
        for (const CartNode& n : tree) {
            nodes.push_back({{"feature", n.feature},
                             {"threshold", n.threshold},
                             {"left", n.left},
                             {"right", n.right},
                             {"leaf_class", n.leaf_class},
                             {"dist", n.dist}});
        }
        j["tree"] = std::move(nodes);
    } else if (kind == "lda") {
        j["means"] = lda_means;
        j["icov"] = lda_icov;
        j["log_priors"] = lda_logpriors;
    } else if (kind == "mlp") {
        j["hidden"] = mlp_hidden;
        j["w1"] = w1;
        j["b1"] = b1;
        j["w2"] = w2;
        j["b2"] = b2;
    }
    return j.dump(2);
}

TrainedModel TrainedModel::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("model json: ") + e.what());
    }
    try {
        TrainedModel m;
        m.kind = j.at("kind").get<std::string>();
        m.num_features = j.at("num_features").get<int>();
        m.num_classes = j.at("num_classes").get<int>();
        if (m.kind == "knn") {
            m.knn_k = j.at("k").get<int>();
            m.knn_X = j.at("X").get<std::vector<double>>();
            m.knn_y = j.at("y").get<std::vector<int>>();
        } else if (m.kind == "gnb") {
            m.gnb_priors = j.at("priors").get<std::vector<double>>();
            m.gnb_means = j.at("means").get<std::vector<double>>();
            m.gnb_vars = j.at("vars").get<std::vector<double>>();
        } else if (m.kind == "cart") {
            for (const nlohmann::json& n : j.at("tree")) {
                CartNode node;
                node.feature = n.at("feature").get<int>();
                node.threshold = n.at("threshold").get<double>();
                node.left = n.at("left").get<int>();
                node.right = n.at("right").get<int>();
                node.leaf_class = n.at("leaf_class").get<int>();
                node.dist = n.at("dist").get<std::vector<double>>();
                m.tree.push_back(std::move(node));
            }
        } else if (m.kind == "lda") {
            m.lda_means = j.at("means").get<std::vector<double>>();
            m.lda_icov = j.at("icov").get<std::vector<double>>();
            m.lda_logpriors = j.at("log_priors").get<std::vector<double>>();
        } else if (m.kind == "mlp") {
            m.mlp_hidden = j.at("hidden").get<int>();
            m.w1 = j.at("w1").get<std::vector<double>>();
            m.b1 = j.at("b1").get<std::vector<double>>();
            m.w2 = j.at("w2").get<std::vector<double>>();
            m.b2 = j.at("b2").get<std::vector<double>>();
        } else {
            throw InvalidArgument("model json: unknown kind '" + m.kind + "'");
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("model json: ") + e.what());
    }
}

} // namespace fer
