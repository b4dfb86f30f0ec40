#include "fer/classify.hpp"
#include "fer/error.hpp"
#include "fer/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

using namespace fer;

namespace {

LabeledDataset dataset_1d(const std::vector<double>& x, const std::vector<int>& y) {
    FeatureMatrix fm(static_cast<int>(x.size()), 1);
    for (std::size_t i = 0; i < x.size(); ++i) fm.at(static_cast<int>(i), 0) = x[i];
    fm.labels = y;
    return make_dataset(fm);
}

// Four well-separated Gaussian blobs for smoke-level accuracy checks.
LabeledDataset blobs(int per_class, int dims, double sep, Rng& rng) {
    const int C = 4;
    FeatureMatrix fm(per_class * C, dims);
    fm.labels.resize(fm.rows);
    int r = 0;
    for (int c = 0; c < C; ++c) {
        for (int s = 0; s < per_class; ++s, ++r) {
            for (int j = 0; j < dims; ++j) {
                const double mu = (j == c % dims) ? sep : 0.0;
                fm.at(r, j) = mu + rng.normal();
            }
            fm.labels[r] = c + 1;
        }
    }
    return make_dataset(fm);
}

} // namespace

TEST_SUITE("classify") {

TEST_CASE("make_dataset validates label coverage") {
    FeatureMatrix fm(4, 2);
    fm.labels = {1, 2, 2, 1};
    const LabeledDataset ds = make_dataset(fm);
    CHECK(ds.rows == 4);
    CHECK(ds.cols == 2);
    CHECK(ds.num_classes == 2);

    FeatureMatrix unlabeled(3, 2);
    CHECK_THROWS_AS(make_dataset(unlabeled), InvalidArgument);

    FeatureMatrix gap(3, 2);
    gap.labels = {1, 3, 3}; // class 2 missing
    CHECK_THROWS_AS(make_dataset(gap), InvalidArgument);

    FeatureMatrix zero(2, 2);
    zero.labels = {0, 1};
    CHECK_THROWS_AS(make_dataset(zero), InvalidArgument);
}

TEST_CASE("subset and select_columns copy the right cells") {
    FeatureMatrix fm(3, 3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) fm.at(i, j) = 10.0 * i + j;
    }
    fm.labels = {1, 2, 1};
    const LabeledDataset ds = make_dataset(fm);

    const LabeledDataset sub = ds.subset({2, 0});
    CHECK(sub.rows == 2);
    CHECK(sub.at(0, 1) == 21.0);
    CHECK(sub.at(1, 0) == 0.0);
    CHECK(sub.y == std::vector<int>{1, 1});
    CHECK(sub.num_classes == 2);

    const LabeledDataset cols = ds.select_columns({2, 0});
    CHECK(cols.cols == 2);
    CHECK(cols.at(1, 0) == 12.0);
    CHECK(cols.at(1, 1) == 10.0);
    CHECK(cols.y == ds.y);
}

TEST_CASE("holdout split sizes, disjointness and determinism") {
    Rng rng(601);
    const LabeledDataset ds = blobs(5, 3, 3.0, rng);
    const Partition p = holdout_split(ds, 0.3, 42);
    CHECK(p.test.size() == 6); // lround(20 * 0.3)
    CHECK(p.train.size() == 14);
    std::set<int> seen(p.train.begin(), p.train.end());
    seen.insert(p.test.begin(), p.test.end());
    CHECK(seen.size() == 20);
    CHECK(*seen.begin() == 0);
    CHECK(*seen.rbegin() == 19);

    const Partition q = holdout_split(ds, 0.3, 42);
    CHECK(q.train == p.train);
    CHECK(q.test == p.test);

    CHECK_THROWS_AS(holdout_split(ds, 0.0, 1), InvalidArgument);
    CHECK_THROWS_AS(holdout_split(ds, 1.0, 1), InvalidArgument);
    CHECK_THROWS_AS(holdout_split(ds, 0.01, 1), InvalidArgument); // empty test side
}

TEST_CASE("kfold split is a disjoint cover with balanced folds") {
    Rng rng(602);
    const LabeledDataset ds = blobs(5, 3, 3.0, rng);
    const Partition p = kfold_split(ds, 3, 7);
    REQUIRE(p.is_kfold());
    REQUIRE(p.folds.size() == 3);
    std::set<int> seen;
    for (const auto& f : p.folds) {
        CHECK(std::abs(static_cast<int>(f.size()) - 20 / 3) <= 1);
        seen.insert(f.begin(), f.end());
    }
    CHECK(seen.size() == 20);

    const Partition q = kfold_split(ds, 3, 7);
    CHECK(q.folds == p.folds);

    CHECK_THROWS_AS(kfold_split(ds, 1, 0), InvalidArgument);
    CHECK_THROWS_AS(kfold_split(ds, 21, 0), InvalidArgument);
}

TEST_CASE("knn votes, distance ties and class ties") {
    const LabeledDataset ds = dataset_1d({0.0, 1.0, 2.0, 10.0}, {1, 1, 2, 2});
    const TrainedModel m3 = train_knn(ds, 3);

    double q = 0.1;
    CHECK(predict(m3, &q, 1, 1).front() == 1);
    FeatureMatrix s = predict_scores(m3, &q, 1, 1);
    CHECK(s.at(0, 0) == doctest::Approx(2.0 / 3.0));
    CHECK(s.at(0, 1) == doctest::Approx(1.0 / 3.0));

    q = 9.0; // nearest: 10, 2, 1
    s = predict_scores(m3, &q, 1, 1);
    CHECK(s.at(0, 1) == doctest::Approx(2.0 / 3.0));
    CHECK(predict(m3, &q, 1, 1).front() == 2);

    // Equal votes fall to the smaller class index.
    const TrainedModel m2 = train_knn(ds, 2);
    q = 1.5; // neighbors 1.0 (class 1) and 2.0 (class 2)
    s = predict_scores(m2, &q, 1, 1);
    CHECK(s.at(0, 0) == doctest::Approx(0.5));
    CHECK(predict(m2, &q, 1, 1).front() == 1);

    // Equal distances fall to the smaller training index.
    const LabeledDataset two = dataset_1d({0.0, 2.0}, {1, 2});
    const TrainedModel m1 = train_knn(two, 1);
    q = 1.0;
    CHECK(predict(m1, &q, 1, 1).front() == 1);

    // k larger than the training set uses every sample.
    const TrainedModel mbig = train_knn(two, 5);
    q = 0.2;
    s = predict_scores(mbig, &q, 1, 1);
    CHECK(s.at(0, 0) == doctest::Approx(0.5));

    CHECK_THROWS_AS(train_knn(ds, 0), InvalidArgument);
    CHECK_THROWS_AS(train_knn(dataset_1d({1, 2}, {1, 1}), 1), InvalidArgument);
    CHECK_THROWS_AS(predict(m3, nullptr, 0, 2), ShapeError); // wrong feature count
}

TEST_CASE("gaussian naive bayes matches hand posteriors") {
    const LabeledDataset ds = dataset_1d({0.0, 2.0, 3.0, 5.0}, {1, 1, 2, 2});
    const TrainedModel m = train_gnb(ds);
    // Class stats: mean 1, var 1 and mean 4, var 1, priors 1/2 each.
    REQUIRE(m.gnb_means.size() == 2);
    CHECK(m.gnb_means[0] == doctest::Approx(1.0));
    CHECK(m.gnb_means[1] == doctest::Approx(4.0));
    CHECK(m.gnb_vars[0] == doctest::Approx(1.0));
    CHECK(m.gnb_priors[0] == doctest::Approx(0.5));

    auto posterior1 = [](double x) {
        const double l1 = std::exp(-0.5 * (x - 1.0) * (x - 1.0));
        const double l2 = std::exp(-0.5 * (x - 4.0) * (x - 4.0));
        return l1 / (l1 + l2);
    };
    for (double x : {0.0, 1.7, 2.5, 3.2, 6.0}) {
        const FeatureMatrix s = predict_scores(m, &x, 1, 1);
        CHECK(s.at(0, 0) == doctest::Approx(posterior1(x)).epsilon(1e-12));
        CHECK(s.at(0, 0) + s.at(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    }
    double q = 2.0;
    CHECK(predict(m, &q, 1, 1).front() == 1);
    q = 3.0;
    CHECK(predict(m, &q, 1, 1).front() == 2);
    q = 2.5; // exact tie resolves to the smaller class
    CHECK(predict(m, &q, 1, 1).front() == 1);

    // Variance flooring keeps degenerate features finite.
    const LabeledDataset flat = dataset_1d({1.0, 1.0, 2.0, 2.0}, {1, 1, 2, 2});
    const TrainedModel mf = train_gnb(flat);
    CHECK(mf.gnb_vars[0] == doctest::Approx(1e-9));
    q = 1.1;
    CHECK(predict(mf, &q, 1, 1).front() == 1);

    // Single-class corpora are allowed for this model.
    const LabeledDataset one = dataset_1d({1.0, 2.0}, {1, 1});
    const TrainedModel m1 = train_gnb(one);
    q = 5.0;
    CHECK(predict(m1, &q, 1, 1).front() == 1);
    CHECK(predict_scores(m1, &q, 1, 1).at(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("cart builds the expected stump on separable data") {
    const LabeledDataset ds =
        dataset_1d({0.0, 1.0, 2.0, 10.0, 11.0, 12.0}, {1, 1, 1, 2, 2, 2});
    const TrainedModel m = train_cart(ds);
    REQUIRE(m.tree.size() == 3);
    CHECK(m.tree[0].feature == 0);
    CHECK(m.tree[0].threshold == doctest::Approx(6.0));
    CHECK(m.tree[0].dist == std::vector<double>{0.5, 0.5});
    const int l = m.tree[0].left, r = m.tree[0].right;
    CHECK(m.tree[l].feature == -1);
    CHECK(m.tree[l].leaf_class == 1);
    CHECK(m.tree[r].leaf_class == 2);
    double q = 5.0;
    CHECK(predict(m, &q, 1, 1).front() == 1);
    q = 7.0;
    CHECK(predict(m, &q, 1, 1).front() == 2);
    q = 6.0; // boundary goes left (<=)
    CHECK(predict(m, &q, 1, 1).front() == 1);
}

TEST_CASE("cart respects min_leaf and stops on zero gain") {
    // min_leaf 2 forbids the 1/3 split; the 2/2 split at 1.5 survives.
    const LabeledDataset ds = dataset_1d({0.0, 1.0, 2.0, 3.0}, {1, 2, 2, 2});
    const TrainedModel m = train_cart(ds, 10, 2);
    REQUIRE(m.tree.size() >= 1);
    CHECK(m.tree[0].feature == 0);
    CHECK(m.tree[0].threshold == doctest::Approx(1.5));

    // min_leaf 3 makes any split impossible: single majority leaf.
    const TrainedModel leaf = train_cart(ds, 10, 3);
    REQUIRE(leaf.tree.size() == 1);
    CHECK(leaf.tree[0].feature == -1);
    CHECK(leaf.tree[0].leaf_class == 2);

    // XOR labels give zero gain for every single-feature split.
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
    const TrainedModel xo = train_cart(make_dataset(fm));
    REQUIRE(xo.tree.size() == 1);
    CHECK(xo.tree[0].leaf_class == 1); // 2-2 tie keeps the smaller class

    CHECK_THROWS_AS(train_cart(ds, 10, 0), InvalidArgument);
    CHECK_THROWS_AS(train_cart(dataset_1d({1, 2}, {1, 1})), InvalidArgument);
}

TEST_CASE("cart max_depth limits the tree") {
    Rng rng(603);
    const LabeledDataset ds = blobs(10, 2, 2.5, rng);
    const TrainedModel stump = train_cart(ds, 1, 1);
    for (const auto& n : stump.tree) {
        if (n.feature >= 0) {
            CHECK(stump.tree[n.left].feature == -1);
            CHECK(stump.tree[n.right].feature == -1);
        }
    }
    CHECK(stump.tree.size() <= 3);
}

TEST_CASE("lda matches the closed-form two-gaussian discriminant") {
    const LabeledDataset ds =
        dataset_1d({-1.0, 0.0, 1.0, 3.0, 4.0, 5.0}, {1, 1, 1, 2, 2, 2});
    const double ridge = 1e-6;
    const TrainedModel m = train_lda(ds, ridge);
    CHECK(m.lda_means[0] == doctest::Approx(0.0));
    CHECK(m.lda_means[1] == doctest::Approx(4.0));
    const double S = 1.0 + ridge; // pooled variance 4/(6-2) = 1 plus the ridge
    CHECK(m.lda_icov[0] == doctest::Approx(1.0 / S).epsilon(1e-9));
    CHECK(m.lda_logpriors[0] == doctest::Approx(std::log(0.5)));

    auto delta = [&](double x, double mu) { return x * mu / S - 0.5 * mu * mu / S + std::log(0.5); };
    for (double x : {-0.5, 1.0, 2.4, 3.3}) {
        const double d1 = delta(x, 0.0), d2 = delta(x, 4.0);
        const double p1 = 1.0 / (1.0 + std::exp(d2 - d1));
        const FeatureMatrix s = predict_scores(m, &x, 1, 1);
        CHECK(s.at(0, 0) == doctest::Approx(p1).epsilon(1e-12));
    }
    // The boundary sits at the midpoint of the means for equal priors.
    double q = 1.9;
    CHECK(predict(m, &q, 1, 1).front() == 1);
    q = 2.1;
    CHECK(predict(m, &q, 1, 1).front() == 2);

    CHECK_THROWS_AS(train_lda(dataset_1d({1, 2}, {1, 1})), InvalidArgument);
}

TEST_CASE("score rows are probability vectors for every model kind") {
    Rng rng(604);
    const LabeledDataset ds = blobs(8, 3, 3.0, rng);
    std::vector<TrainedModel> models;
    models.push_back(train_knn(ds, 5));
    models.push_back(train_gnb(ds));
    models.push_back(train_cart(ds));
    models.push_back(train_lda(ds));
    models.push_back(mlp_train(ds, MlpParams{4, "gd", 0.05, 40, 1.0, 0.0, 0.0, 6}, 1));
    for (const TrainedModel& m : models) {
        const FeatureMatrix s = predict_scores(m, ds.X.data(), ds.rows, ds.cols);
        REQUIRE(s.cols == 4);
        for (int r = 0; r < s.rows; ++r) {
            double sum = 0.0;
            for (int c = 0; c < 4; ++c) {
                CHECK(s.at(r, c) >= 0.0);
                sum += s.at(r, c);
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("well-separated blobs are classified accurately by every model") {
    Rng rng(605);
    const LabeledDataset ds = blobs(20, 10, 3.0, rng);
    const Partition p = holdout_split(ds, 0.3, 5);
    const LabeledDataset train = ds.subset(p.train);
    const LabeledDataset test = ds.subset(p.test);
    for (const TrainedModel& m : {train_knn(train, 5), train_gnb(train),
                                  train_cart(train), train_lda(train)}) {
        const double err = loss_01(m, test);
        CHECK(err <= 0.2);
    }
    const TrainedModel knn1 = train_knn(train, 1);
    CHECK(loss_01(knn1, train) == 0.0); // 1-nn memorizes its training set
}

TEST_CASE("confusion matrix counts and derived rates") {
    const std::vector<int> yt = {1, 1, 2, 2, 3};
    const std::vector<int> yp = {1, 2, 2, 2, 3};
    const ConfusionMatrix cm = confusion(yt, yp, 3);
    CHECK(cm.at(0, 0) == 1);
    CHECK(cm.at(0, 1) == 1);
    CHECK(cm.at(1, 1) == 2);
    CHECK(cm.at(2, 2) == 1);
    CHECK(cm.total() == 5);
    CHECK(cm.accuracy() == doctest::Approx(0.8));
    const std::vector<double> prec = cm.precision();
    CHECK(prec[0] == doctest::Approx(1.0));
    CHECK(prec[1] == doctest::Approx(2.0 / 3.0));
    CHECK(prec[2] == doctest::Approx(1.0));
    const std::vector<double> rec = cm.recall();
    CHECK(rec[0] == doctest::Approx(0.5));
    CHECK(rec[1] == doctest::Approx(1.0));
    CHECK(rec[2] == doctest::Approx(1.0));

    // Absent predicted class yields precision 0, not NaN.
    const ConfusionMatrix none = confusion({1, 1, 2}, {1, 1, 1}, 2);
    CHECK(none.precision()[1] == 0.0);

    CHECK_THROWS_AS(confusion({1, 2}, {1}, 2), InvalidArgument);
    CHECK_THROWS_AS(confusion({1, 3}, {1, 1}, 2), InvalidArgument);
    CHECK_THROWS_AS(confusion({1}, {1}, 0), InvalidArgument);
}

TEST_CASE("roc points and auc on hand-checked sweeps") {
    // pos = 3, neg = 1; thresholds 0.9 .8 .7 .6.
    const std::vector<double> s = {0.9, 0.8, 0.7, 0.6};
    const std::vector<int> y = {1, 1, 0, 1};
    const auto pts = roc_points(s, y);
    const std::vector<std::pair<double, double>> expect = {
        {0.0, 0.0}, {0.0, 1.0 / 3.0}, {0.0, 2.0 / 3.0}, {1.0, 2.0 / 3.0}, {1.0, 1.0}};
    REQUIRE(pts.size() == expect.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(pts[i].first == doctest::Approx(expect[i].first));
        CHECK(pts[i].second == doctest::Approx(expect[i].second));
    }
    CHECK(roc_auc(pts) == doctest::Approx(2.0 / 3.0));

    CHECK(roc_auc(roc_points({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0})) == doctest::Approx(1.0));
    CHECK(roc_auc(roc_points({0.1, 0.2, 0.8, 0.9}, {1, 1, 0, 0})) == doctest::Approx(0.0));
    // Tied scores collapse to a single diagonal segment.
    CHECK(roc_auc(roc_points({0.5, 0.5}, {1, 0})) == doctest::Approx(0.5));

    CHECK_THROWS_AS(roc_points({}, {}), InvalidArgument);
    CHECK_THROWS_AS(roc_points({0.5}, {1, 0}), InvalidArgument);
    CHECK_THROWS_AS(roc_points({0.5, 0.4}, {1, 1}), InvalidArgument);
}

TEST_CASE("models survive a json round trip with identical predictions") {
    Rng rng(606);
    const LabeledDataset ds = blobs(8, 4, 3.0, rng);
    FeatureMatrix probe(10, 4);
    for (double& v : probe.data) v = rng.normal();

    std::vector<TrainedModel> models;
    models.push_back(train_knn(ds, 3));
    models.push_back(train_gnb(ds));
    models.push_back(train_cart(ds));
    models.push_back(train_lda(ds));
    models.push_back(mlp_train(ds, MlpParams{3, "gd", 0.05, 30, 1.0, 0.0, 0.0, 6}, 2));
    for (const TrainedModel& m : models) {
        const TrainedModel back = TrainedModel::from_json(m.to_json());
        CHECK(back.kind == m.kind);
        CHECK(back.num_features == m.num_features);
        CHECK(predict(back, probe) == predict(m, probe));
        const FeatureMatrix sa = predict_scores(m, probe);
        const FeatureMatrix sb = predict_scores(back, probe);
        CHECK(sa.data == sb.data);
    }

    CHECK_THROWS_AS(TrainedModel::from_json("not json"), InvalidArgument);
    CHECK_THROWS_AS(TrainedModel::from_json("{\"kind\":\"svm\",\"num_features\":1,"
                                            "\"num_classes\":2}"),
                    InvalidArgument);
    CHECK_THROWS_AS(TrainedModel::from_json("{\"kind\":\"knn\"}"), InvalidArgument);
}

} // TEST_SUITE
