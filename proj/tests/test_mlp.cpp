#include "fer/classify.hpp"
#include "fer/error.hpp"
#include "fer/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace fer;

namespace {

std::vector<double*> all_params(MlpNet& n) {
    std::vector<double*> p;
    for (double& v : n.w1) p.push_back(&v);
    for (double& v : n.b1) p.push_back(&v);
    for (double& v : n.w2) p.push_back(&v);
    for (double& v : n.b2) p.push_back(&v);
    return p;
}

// Max relative disagreement between the analytic gradient and central
// differences over every parameter of a random network.
double max_gradient_error(int in, int hidden, int out, std::uint64_t seed) {
    Rng rng(seed);
    MlpNet net = mlp_init(in, hidden, out, rng);
    const int rows = 5;
    std::vector<double> X(static_cast<std::size_t>(rows) * in);
    std::vector<int> y(rows);
    for (double& v : X) v = rng.normal();
    for (int r = 0; r < rows; ++r) y[r] = 1 + static_cast<int>(rng.uniform_index(out));

    MlpNet grad;
    mlp_gradient(net, X.data(), rows, y.data(), grad);
    std::vector<double*> gp = all_params(grad);
    std::vector<double*> np = all_params(net);

    const double eps = 1e-6;
    double worst = 0.0;
    for (std::size_t i = 0; i < np.size(); ++i) {
        const double save = *np[i];
        *np[i] = save + eps;
        const double lp = mlp_loss(net, X.data(), rows, y.data());
        *np[i] = save - eps;
        const double lm = mlp_loss(net, X.data(), rows, y.data());
        *np[i] = save;
        const double num = (lp - lm) / (2.0 * eps);
        const double err = std::abs(*gp[i] - num) / std::max({1.0, std::abs(*gp[i]), std::abs(num)});
        worst = std::max(worst, err);
    }
    return worst;
}

LabeledDataset xor_dataset() {
    FeatureMatrix fm(4, 2);
    fm.at(0, 0) = 0;
    fm.at(0, 1) = 0;
    fm.at(1, 0) = 0;
    fm.at(1, 1) = 1;
    fm.at(2, 0) = 1;
    fm.at(2, 1) = 0;
    fm.at(3, 0) = 1;
    fm.at(3, 1) = 1;
    fm.labels = {1, 2, 2, 1};
    return make_dataset(fm);
}

LabeledDataset two_blobs(int per_class, std::uint64_t seed) {
    Rng rng(seed);
    FeatureMatrix fm(2 * per_class, 2);
    fm.labels.resize(fm.rows);
    for (int i = 0; i < 2 * per_class; ++i) {
        const int c = i < per_class ? 0 : 1;
        fm.at(i, 0) = (c == 0 ? -2.0 : 2.0) + rng.normal();
        fm.at(i, 1) = rng.normal();
        fm.labels[i] = c + 1;
    }
    return make_dataset(fm);
}

} // namespace

TEST_SUITE("mlp") {

TEST_CASE("initialization is seeded and bounded") {
    Rng a(31), b(31), c(32);
    const MlpNet n1 = mlp_init(4, 6, 3, a);
    const MlpNet n2 = mlp_init(4, 6, 3, b);
    const MlpNet n3 = mlp_init(4, 6, 3, c);
    CHECK(n1.w1 == n2.w1);
    CHECK(n1.w2 == n2.w2);
    CHECK(n1.b1 == n2.b1);
    CHECK(n1.w1 != n3.w1);
    CHECK(n1.w1.size() == 24);
    CHECK(n1.w2.size() == 18);
    for (double w : n1.w1) CHECK(std::abs(w) <= 0.5 / 2.0); // 1/sqrt(4)
    for (double w : n1.w2) CHECK(std::abs(w) <= 0.5 / std::sqrt(6.0));
    Rng r(1);
    CHECK_THROWS_AS(mlp_init(0, 2, 2, r), InvalidArgument);
    CHECK_THROWS_AS(mlp_init(2, 0, 2, r), InvalidArgument);
}

TEST_CASE("forward rows are softmax distributions") {
    Rng rng(33);
    const MlpNet net = mlp_init(3, 5, 4, rng);
    std::vector<double> X(6 * 3);
    for (double& v : X) v = rng.normal();
    const std::vector<double> out = mlp_forward(net, X.data(), 6);
    REQUIRE(out.size() == 24);
    for (int r = 0; r < 6; ++r) {
        double sum = 0.0;
        for (int c = 0; c < 4; ++c) {
            CHECK(out[static_cast<std::size_t>(r) * 4 + c] > 0.0);
            sum += out[static_cast<std::size_t>(r) * 4 + c];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("analytic gradient agrees with central differences") {
    CHECK(max_gradient_error(2, 3, 2, 41) <= 1e-5);
    CHECK(max_gradient_error(4, 5, 3, 42) <= 1e-5);
    CHECK(max_gradient_error(3, 2, 4, 43) <= 1e-5);
}

TEST_CASE("gradient descent reduces the training loss") {
    const LabeledDataset ds = two_blobs(10, 51);
    MlpParams p;
    p.hidden = 4;
    p.trainer = "gd";
    p.lr = 0.1;
    p.epochs = 60;
    p.train_frac = 1.0;
    p.val_frac = 0.0;
    p.test_frac = 0.0;
    MlpHistory h;
    const TrainedModel m = mlp_train(ds, p, 7, &h);
    REQUIRE(h.train_loss.size() == 60);
    CHECK(h.val_loss.empty());
    CHECK(h.best_epoch == 60);
    CHECK(h.train_loss.back() < h.train_loss.front());
    CHECK(h.train_idx.size() == 20);
    CHECK(h.val_idx.empty());
    CHECK(h.test_idx.empty());
    CHECK(loss_01(m, ds) <= 0.1);
}

TEST_CASE("rprop solves xor") {
    const LabeledDataset ds = xor_dataset();
    MlpParams p;
    p.hidden = 4;
    p.trainer = "rprop";
    p.epochs = 2000;
    p.train_frac = 1.0;
    p.val_frac = 0.0;
    p.test_frac = 0.0;
    bool solved = false;
    for (std::uint64_t seed = 1; seed <= 3 && !solved; ++seed) {
        const TrainedModel m = mlp_train(ds, p, seed);
        solved = loss_01(m, ds) == 0.0;
    }
    CHECK(solved);
}

TEST_CASE("training is seed-deterministic") {
    const LabeledDataset ds = two_blobs(12, 52);
    MlpParams p;
    p.hidden = 3;
    p.epochs = 120;
    const TrainedModel a = mlp_train(ds, p, 9);
    const TrainedModel b = mlp_train(ds, p, 9);
    CHECK(a.w1 == b.w1);
    CHECK(a.b1 == b.b1);
    CHECK(a.w2 == b.w2);
    CHECK(a.b2 == b.b2);
}

TEST_CASE("validation split drives early stopping bookkeeping") {
    const LabeledDataset ds = two_blobs(20, 53);
    MlpParams p;
    p.hidden = 4;
    p.epochs = 300;
    p.patience = 4;
    MlpHistory h;
    const TrainedModel m = mlp_train(ds, p, 11, &h);
    REQUIRE(!h.val_loss.empty());
    CHECK(h.val_loss.size() == h.train_loss.size());
    CHECK(h.train_idx.size() == 28); // lround(40 * 0.7)
    CHECK(h.val_idx.size() == 6);    // lround(40 * 0.15)
    CHECK(h.test_idx.size() == 6);
    REQUIRE(h.best_epoch >= 1);
    CHECK(h.best_epoch <= static_cast<int>(h.train_loss.size()));
    // The kept weights are the ones with the lowest validation loss.
    double best = 1e300;
    int arg = 0;
    for (std::size_t i = 0; i < h.val_loss.size(); ++i) {
        if (h.val_loss[i] < best) {
            best = h.val_loss[i];
            arg = static_cast<int>(i) + 1;
        }
    }
    CHECK(h.best_epoch == arg);
    CHECK(m.kind == "mlp");
    CHECK(m.mlp_hidden == 4);
    // Stopped after `patience` epochs without improvement (or ran out).
    if (h.train_loss.size() < 300) {
        CHECK(static_cast<int>(h.train_loss.size()) == h.best_epoch + p.patience);
    }
}

TEST_CASE("parameter and split validation") {
    const LabeledDataset ds = two_blobs(5, 54);
    MlpParams p;
    p.hidden = 0;
    CHECK_THROWS_AS(mlp_train(ds, p, 1), InvalidArgument);
    p.hidden = 2;
    p.trainer = "adam";
    CHECK_THROWS_AS(mlp_train(ds, p, 1), InvalidArgument);
    p.trainer = "gd";
    p.epochs = -1;
    CHECK_THROWS_AS(mlp_train(ds, p, 1), InvalidArgument);
    p.epochs = 10;
    p.train_frac = 0.5;
    p.val_frac = 0.2;
    p.test_frac = 0.2; // sums to 0.9
    CHECK_THROWS_AS(mlp_train(ds, p, 1), InvalidArgument);
    p.train_frac = -0.1;
    p.val_frac = 0.55;
    p.test_frac = 0.55;
    CHECK_THROWS_AS(mlp_train(ds, p, 1), InvalidArgument);

    // Fractions that round a requested split down to nothing.
    const LabeledDataset tiny = two_blobs(2, 55); // 4 samples
    p = MlpParams{};
    p.epochs = 5;
    p.train_frac = 0.9;
    p.val_frac = 0.05;
    p.test_frac = 0.05;
    CHECK_THROWS_AS(mlp_train(tiny, p, 1), InvalidArgument); // empty validation
    p.train_frac = 0.05;
    p.val_frac = 0.05;
    p.test_frac = 0.9;
    CHECK_THROWS_AS(mlp_train(tiny, p, 1), InvalidArgument); // empty train

    // Zero epochs leaves the freshly initialized network.
    p = MlpParams{};
    p.epochs = 0;
    p.train_frac = 1.0;
    p.val_frac = 0.0;
    p.test_frac = 0.0;
    MlpHistory h;
    const TrainedModel m = mlp_train(tiny, p, 1, &h);
    CHECK(h.train_loss.empty());
    CHECK(h.best_epoch == 0);
    CHECK(m.num_features == 2);
}

} // TEST_SUITE
