#include <cmath>
#include <map>
#include <sstream>

#include "doctest.h"
#include "ecgbeat/cv.hpp"
#include "ecgbeat/errors.hpp"
#include "ecgbeat/metrics.hpp"
#include "ecgbeat/model.hpp"
#include "test_support.hpp"

using namespace ecgbeat;

namespace {

LabeledRows four_sample() {
    LabeledRows d;
    d.rows = Matrix(4, 1);
    d.rows(2, 0) = 1.0;
    d.rows(3, 0) = 1.0;
    d.labels = {0, 0, 1, 1};
    return d;
}

GbdtParams stump_params() {
    GbdtParams p;
    p.n_estimators = 1;
    p.max_depth = 1;
    p.min_data_in_leaf = 1;
    p.l1_alpha = 0.0;
    p.l2_lambda = 0.0;
    p.learning_rate = 0.5;
    return p;
}

// Three well separated 2-D clusters.
LabeledRows blobs(std::size_t per_class, std::uint64_t seed, double spread = 0.3) {
    Rng rng(seed);
    LabeledRows d;
    d.rows = Matrix(3 * per_class, 2);
    const double cx[] = {0.0, 3.0, 0.0}, cy[] = {0.0, 0.0, 3.0};
    for (std::size_t i = 0; i < 3 * per_class; ++i) {
        const auto c = i % 3;
        d.rows(i, 0) = cx[c] + spread * (2 * rng.uniform() - 1);
        d.rows(i, 1) = cy[c] + spread * (2 * rng.uniform() - 1);
        d.labels.push_back(static_cast<ClassId>(c));
    }
    return d;
}

double accuracy(const EnsembleModel& m, const LabeledRows& d) {
    const auto pred = predict_labels(m, d.rows);
    std::size_t ok = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == d.labels[i];
    return static_cast<double>(ok) / static_cast<double>(pred.size());
}

std::string dump(const EnsembleModel& m) {
    std::ostringstream s;
    write_model(m, s);
    return s.str();
}

}  // namespace

TEST_CASE("gbdt four-sample hand derivation") {
    // p = 0.5 everywhere; class 0 gradients -0.5 (rows 0,1) and +0.5 (rows 2,3),
    // hessians 0.25. Left leaf: G = -1, H = 0.5, weight -G/H = 2, times lr = 1.
    const auto d = four_sample();
    const auto m = fit_gbdt(d.rows, d.labels, stump_params());
    REQUIRE(m.trees.size() == 2);
    const auto& t0 = m.trees[0];
    REQUIRE(t0.nodes.size() == 3);
    CHECK(t0.nodes[0].feature == 0);
    CHECK(t0.nodes[0].threshold == 0.5);
    CHECK(std::abs(t0.nodes[1].value[0] - 1.0) < 1e-9);
    CHECK(std::abs(t0.nodes[2].value[0] - -1.0) < 1e-9);
    const auto& t1 = m.trees[1];
    CHECK(std::abs(t1.nodes[1].value[0] - -1.0) < 1e-9);
    CHECK(std::abs(t1.nodes[2].value[0] - 1.0) < 1e-9);

    const auto p = m.predict(std::vector<double>{0.0});
    CHECK(p.label == 0);
    CHECK(p.probabilities[0] == doctest::Approx(std::exp(1.0) / (std::exp(1.0) + std::exp(-1.0))));
    CHECK(m.predict(std::vector<double>{1.0}).label == 1);
}

TEST_CASE("l1 soft-threshold zeroes small leaf sums") {
    const auto d = four_sample();
    auto p = stump_params();
    p.l1_alpha = 1.0;  // |G| = 1 in every leaf
    const auto m = fit_gbdt(d.rows, d.labels, p);
    for (const auto& tree : m.trees)
        for (const auto& node : tree.nodes)
            if (node.is_leaf()) CHECK(node.value[0] == 0.0);
}

TEST_CASE("gbdt separates blobs and never increases training loss") {
    const auto d = blobs(40, 1);
    GbdtParams p;
    p.n_estimators = 50;
    p.max_depth = 4;
    p.min_data_in_leaf = 2;
    std::vector<double> loss;
    const auto m = fit_gbdt(d.rows, d.labels, p, 0, &loss);
    CHECK(m.trees.size() == 150);
    CHECK(accuracy(m, d) == 1.0);
    REQUIRE(loss.size() == 51);
    for (std::size_t r = 1; r < loss.size(); ++r) CHECK(loss[r] <= loss[r - 1] + 1e-6);
    CHECK(multiclass_logloss(m, d.rows, d.labels, 50) == doctest::Approx(loss.back()).epsilon(1e-12));
}

TEST_CASE("min_data_in_leaf is respected") {
    const auto d = blobs(30, 2, 1.5);
    GbdtParams p;
    p.n_estimators = 5;
    p.max_depth = 6;
    p.min_data_in_leaf = 7;
    const auto m = fit_gbdt(d.rows, d.labels, p);
    for (const auto& tree : m.trees) {
        std::map<const TreeNode*, int> count;
        for (std::size_t i = 0; i < d.rows.rows(); ++i) ++count[&tree.leaf_for(d.rows.row(i))];
        for (const auto& [leaf, c] : count) CHECK(c >= 7);
    }
}

TEST_CASE("split ties go to the lowest feature, then the lowest threshold") {
    SUBCASE("two identical features") {
        LabeledRows d = four_sample();
        Matrix two(4, 2);
        for (std::size_t i = 0; i < 4; ++i) two(i, 0) = two(i, 1) = d.rows(i, 0);
        const auto m = fit_gbdt(two, d.labels, stump_params());
        CHECK(m.trees[0].nodes[0].feature == 0);
    }
    SUBCASE("mirror-symmetric thresholds") {
        Matrix x(4, 1);
        for (std::size_t i = 0; i < 4; ++i) x(i, 0) = static_cast<double>(i);
        const std::vector<ClassId> y{1, 0, 0, 1};
        const auto m = fit_gbdt(x, y, stump_params());
        CHECK(m.trees[0].nodes[0].threshold == 0.5);
    }
}

TEST_CASE("gbdt errors") {
    const auto d = four_sample();
    const std::vector<ClassId> one_class{0, 0, 0, 0};
    CHECK_THROWS_AS(fit_gbdt(d.rows, one_class, stump_params()), ValidationError);
    Matrix bad = d.rows;
    bad(1, 0) = std::nan("");
    CHECK_THROWS_AS(fit_gbdt(bad, d.labels, stump_params()), ValidationError);
    auto p = stump_params();
    p.learning_rate = 0.0;
    CHECK_THROWS_AS(fit_gbdt(d.rows, d.labels, p), ValidationError);
}

TEST_CASE("prediction contract") {
    const auto d = blobs(10, 3);
    GbdtParams p;
    p.n_estimators = 0;
    const auto empty = fit_gbdt(d.rows, d.labels, p);
    const auto pred = empty.predict(std::vector<double>{0.3, 0.1});
    CHECK(pred.label == 0);
    for (double v : pred.probabilities) CHECK(v == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(empty.predict(std::vector<double>{1.0}), ValidationError);

    p.n_estimators = 10;
    p.min_data_in_leaf = 2;
    auto m = fit_gbdt(d.rows, d.labels, p);
    Rng rng(4);
    for (int t = 0; t < 100; ++t) {
        const std::vector<double> row{6 * rng.uniform() - 1.5, 6 * rng.uniform() - 1.5};
        const auto q = m.predict(row);
        double s = 0.0;
        for (double v : q.probabilities) s += v;
        CHECK(std::abs(s - 1.0) < 1e-9);
        // Shift invariance of softmax.
        auto shifted = m;
        for (double& b : shifted.base_score) b += 17.0;
        CHECK(shifted.predict(row).label == q.label);
    }
    CHECK(argmax(std::vector<double>{0.2, 0.4, 0.4}) == 1);
}

TEST_CASE("random forest") {
    const auto d = blobs(30, 5, 0.8);
    RfParams p;
    p.n_trees = 1;
    p.features_per_split = 76;
    p.bootstrap = false;
    p.seed = 1;
    CHECK(accuracy(fit_random_forest(d.rows, d.labels, p), d) >= 0.95);

    p.n_trees = 3;
    p.bootstrap = true;
    const auto a = fit_random_forest(d.rows, d.labels, p);
    const auto b = fit_random_forest(d.rows, d.labels, p);
    CHECK(dump(a) == dump(b));
    Rng rng(6);
    for (int t = 0; t < 50; ++t) {
        const std::vector<double> row{4 * rng.uniform() - 1, 4 * rng.uniform() - 1};
        CHECK(a.predict(row).probabilities == b.predict(row).probabilities);
    }
}

TEST_CASE("random forest learns a sign threshold") {
    auto sample = [](std::size_t n, std::uint64_t seed) {
        Rng rng(seed);
        LabeledRows d;
        d.rows = Matrix(n, 1);
        for (std::size_t i = 0; i < n; ++i) {
            d.rows(i, 0) = 2 * rng.uniform() - 1;
            d.labels.push_back(d.rows(i, 0) > 0 ? 1 : 0);
        }
        return d;
    };
    const auto train = sample(400, 1), test = sample(2000, 2);
    RfParams p;
    p.n_trees = 15;
    p.seed = 3;
    CHECK(accuracy(fit_random_forest(train.rows, train.labels, p), test) >= 0.99);
}

TEST_CASE("model files round-trip") {
    const auto d = blobs(20, 7, 1.0);
    GbdtParams gp;
    gp.n_estimators = 8;
    gp.max_depth = 3;
    gp.min_data_in_leaf = 2;
    RfParams rp;
    rp.n_trees = 4;
    rp.features_per_split = 1;
    rp.seed = 11;
    GbdtParams none;
    none.n_estimators = 0;

    ecgbeat::testing::TempDir dir;
    for (const auto& m : {fit_gbdt(d.rows, d.labels, gp), fit_random_forest(d.rows, d.labels, rp),
                          fit_gbdt(d.rows, d.labels, none)}) {
        save_model(m, dir / "m.txt");
        const auto back = load_model(dir / "m.txt");
        CHECK(dump(back) == dump(m));
        Rng rng(8);
        for (int t = 0; t < 100; ++t) {
            const std::vector<double> row{8 * rng.uniform() - 3, 8 * rng.uniform() - 3};
            CHECK(back.predict(row).probabilities == m.predict(row).probabilities);
        }
    }
    CHECK(dump(fit_gbdt(d.rows, d.labels, gp)) == dump(fit_gbdt(d.rows, d.labels, gp)));
}

TEST_CASE("corrupt model files are rejected") {
    const auto d = four_sample();
    const auto text = dump(fit_gbdt(d.rows, d.labels, stump_params()));
    auto load = [](const std::string& s) {
        std::istringstream in(s);
        return read_model(in);
    };
    CHECK_NOTHROW(load(text));
    CHECK_THROWS_AS(load("ecgbeat-modle 1\n" + text.substr(text.find('\n') + 1)), ParseError);
    CHECK_THROWS_AS(load("ecgbeat-model 2\n" + text.substr(text.find('\n') + 1)), ParseError);
    CHECK_THROWS_AS(load(text.substr(0, text.size() / 2)), ParseError);
    CHECK_THROWS_AS(load(text.substr(0, text.rfind("end"))), ParseError);
    std::string bad_child = text;
    bad_child.replace(bad_child.find("split 0 0.5 1 2"), 15, "split 0 0.5 0 2");
    CHECK_THROWS_AS(load(bad_child), ParseError);
}

TEST_CASE("stratified folds and split") {
    Rng rng(9);
    std::vector<ClassId> labels;
    for (int i = 0; i < 301; ++i) labels.push_back(static_cast<ClassId>(rng.below(10) < 7 ? 0 : rng.below(2) + 1));
    std::map<ClassId, std::size_t> totals;
    for (ClassId y : labels) ++totals[y];

    for (std::size_t k : {2u, 3u, 5u}) {
        const auto fold = stratified_folds(labels, k, 123);
        std::map<std::pair<ClassId, std::size_t>, std::size_t> hist;
        for (std::size_t i = 0; i < labels.size(); ++i) ++hist[{labels[i], fold[i]}];
        for (const auto& [cls, total] : totals)
            for (std::size_t f = 0; f < k; ++f) {
                const double expected = static_cast<double>(total) / static_cast<double>(k);
                CHECK(std::abs(static_cast<double>(hist[{cls, f}]) - expected) <= 1.0);
            }
    }
    CHECK_THROWS_AS(stratified_folds(std::vector<ClassId>{0, 0, 0, 1, 1}, 3, 1), ValidationError);

    const auto split = stratified_split(labels, 0.2, 5);
    CHECK(split.train.size() + split.test.size() == labels.size());
    std::map<ClassId, std::size_t> test_counts;
    for (auto i : split.test) ++test_counts[labels[i]];
    for (const auto& [cls, total] : totals)
        CHECK(test_counts[cls] == static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(total))));
}

TEST_CASE("grid search") {
    const auto d = blobs(15, 10, 0.5);
    GbdtParams weak;
    weak.n_estimators = 0;
    GbdtParams strong;
    strong.n_estimators = 20;
    strong.max_depth = 3;
    strong.min_data_in_leaf = 2;

    const auto single = grid_search(d.rows, d.labels, {ModelSpec{strong}}, 3, 1);
    CHECK(single.best == 0);
    CHECK(single.fold_f1[0].size() == 3);

    const auto pick = grid_search(d.rows, d.labels, {ModelSpec{weak}, ModelSpec{strong}}, 3, 1);
    CHECK(pick.best == 1);
    CHECK(pick.mean_f1[1] > pick.mean_f1[0]);

    const auto tie = grid_search(d.rows, d.labels, {ModelSpec{strong}, ModelSpec{strong}}, 3, 1);
    CHECK(tie.best == 0);

    BalancePlan plan;
    plan.targets = {{0, 12}, {1, 12}, {2, 12}};
    const auto balanced = grid_search(d.rows, d.labels, {ModelSpec{strong}}, 3, 1, plan);
    CHECK(balanced.mean_f1[0] > 0.9);

    CHECK_THROWS_AS(grid_search(d.rows, d.labels, {ModelSpec{strong}}, 16, 1), ValidationError);
}
