#pragma once

#include "fer/featmat.hpp"
#include "fer/rng.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace fer {

struct LabeledDataset {
    int rows = 0;
    int cols = 0;
    std::vector<double> X; // row-major
    std::vector<int> y;    // classes 1..num_classes
    int num_classes = 0;

    double at(int r, int c) const { return X[static_cast<std::size_t>(r) * cols + c]; }
    LabeledDataset subset(const std::vector<int>& idx) const;
    LabeledDataset select_columns(const std::vector<int>& cols_keep) const;
};

// Requires labels; classes must cover 1..C with every class present.
LabeledDataset make_dataset(const FeatureMatrix& fm);

struct Partition {
    std::vector<int> train;
    std::vector<int> test;
    std::vector<std::vector<int>> folds;
    bool is_kfold() const { return !folds.empty(); }
};

Partition holdout_split(const LabeledDataset& ds, double test_fraction, std::uint64_t seed);
Partition kfold_split(const LabeledDataset& ds, int k, std::uint64_t seed);

struct TrainedModel {
    std::string kind; // knn | gnb | cart | lda | mlp
    int num_features = 0;
    int num_classes = 0;

    // knn
    int knn_k = 0;
    std::vector<double> knn_X;
    std::vector<int> knn_y;

    // gnb
    std::vector<double> gnb_priors;
    std::vector<double> gnb_means; // C x d
    std::vector<double> gnb_vars;  // C x d, floored

    // cart
    struct CartNode {
        int feature = -1; // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        int leaf_class = 0;
        std::vector<double> dist; // class distribution at the node
    };
    std::vector<CartNode> tree;

    // lda
    std::vector<double> lda_means;     // C x d
    std::vector<double> lda_icov;      // d x d inverse pooled covariance
    std::vector<double> lda_logpriors; // C

    // mlp (d -> hidden tanh -> C softmax)
    int mlp_hidden = 0;
    std::vector<double> w1, b1, w2, b2;

    std::string to_json() const;
    static TrainedModel from_json(const std::string& text);
};

TrainedModel train_knn(const LabeledDataset& ds, int k);
TrainedModel train_gnb(const LabeledDataset& ds);
TrainedModel train_cart(const LabeledDataset& ds, int max_depth = 10, int min_leaf = 1);
TrainedModel train_lda(const LabeledDataset& ds, double ridge = 1e-6);

std::vector<int> predict(const TrainedModel& model, const double* X, int rows, int cols);
std::vector<int> predict(const TrainedModel& model, const FeatureMatrix& fm);
std::vector<int> predict(const TrainedModel& model, const LabeledDataset& ds);

// Per-class score matrix (rows x C); rows are probability vectors.
FeatureMatrix predict_scores(const TrainedModel& model, const double* X, int rows, int cols);
FeatureMatrix predict_scores(const TrainedModel& model, const FeatureMatrix& fm);

struct ConfusionMatrix {
    int num_classes = 0;
    std::vector<long> counts; // rows = true class, cols = predicted

    long at(int t, int p) const { return counts[static_cast<std::size_t>(t) * num_classes + p]; }
    long total() const;
    double accuracy() const;
    std::vector<double> precision() const; // per predicted class
    std::vector<double> recall() const;    // per true class
};

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred, int C);

// Threshold sweep over descending unique scores; a sample is called positive
// when score >= threshold.  Includes (0,0) and (1,1).
std::vector<std::pair<double, double>> roc_points(const std::vector<double>& scores,
                                                  const std::vector<int>& y_true);
double roc_auc(const std::vector<std::pair<double, double>>& pts);

double loss_01(const TrainedModel& model, const LabeledDataset& ds);

// --- shallow pattern network --------------------------------------------

struct MlpNet {
    int in = 0, hidden = 0, out = 0;
    std::vector<double> w1, b1; // hidden x in, hidden
    std::vector<double> w2, b2; // out x hidden, out
};

MlpNet mlp_init(int in, int hidden, int out, Rng& rng);
// Softmax class probabilities for each row of X.
std::vector<double> mlp_forward(const MlpNet& net, const double* X, int rows);
// Mean cross-entropy of one-hot targets.
double mlp_loss(const MlpNet& net, const double* X, int rows, const int* y);
// Analytic gradient of mlp_loss; grad has the net's shape.
void mlp_gradient(const MlpNet& net, const double* X, int rows, const int* y, MlpNet& grad);

struct MlpParams {
    int hidden = 10;
    std::string trainer = "rprop"; // rprop | gd
    double lr = 0.01;
    int epochs = 1000;
    double train_frac = 0.7, val_frac = 0.15, test_frac = 0.15;
    int patience = 6;
};

struct MlpHistory {
    std::vector<double> train_loss;
    std::vector<double> val_loss; // empty when there is no validation split
    std::vector<int> train_idx, val_idx, test_idx;
    int best_epoch = 0;
};

TrainedModel mlp_train(const LabeledDataset& ds, const MlpParams& params, std::uint64_t seed,
                       MlpHistory* history = nullptr);

} // namespace fer
