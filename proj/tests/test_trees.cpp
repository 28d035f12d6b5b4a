#include <doctest.h>

#include <numeric>

#include "ozonecast/ensemble.hpp"
#include "ozonecast/errors.hpp"
#include "ozonecast/parallel.hpp"
#include "ozonecast/rng.hpp"
#include "ozonecast/tree.hpp"
#include "oracles.hpp"

using namespace ozonecast;

namespace {
std::vector<int> iota_rows(int n) {
    std::vector<int> r(static_cast<std::size_t>(n));
    std::iota(r.begin(), r.end(), 0);
    return r;
}

std::vector<int> iota_features(int p) { return iota_rows(p); }

Eigen::MatrixXd random_matrix(int n, int p, Rng& rng) {
    Eigen::MatrixXd X(n, p);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
    }
    return X;
}

bool same_tree(const RegressionTree& a, const RegressionTree& b) {
    if (a.nodes.size() != b.nodes.size()) return false;
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        const TreeNode& x = a.nodes[i];
        const TreeNode& y = b.nodes[i];
        if (x.feature != y.feature || x.threshold != y.threshold || x.left != y.left ||
            x.right != y.right || x.value != y.value || x.n_samples != y.n_samples) {
            return false;
        }
    }
    return true;
}
}  // namespace

TEST_CASE("best_split basic contracts") {
    SUBCASE("constant target provides no split") {
        Eigen::MatrixXd X(4, 1);
        X << 1, 2, 3, 4;
        Eigen::VectorXd y = Eigen::VectorXd::Constant(4, 3.3);
        CHECK_FALSE(best_split(X, y, iota_rows(4), iota_features(1), 1).has_value());
    }
    SUBCASE("perfect separation splits at the midpoint") {
        Eigen::MatrixXd X(4, 1);
        X << 0, 0, 1, 1;
        Eigen::VectorXd y(4);
        y << 0, 0, 10, 10;
        const auto split = best_split(X, y, iota_rows(4), iota_features(1), 1);
        REQUIRE(split.has_value());
        CHECK(split->feature == 0);
        CHECK(split->threshold == doctest::Approx(0.5));
        CHECK(split->gain == doctest::Approx(100.0));  // SSE drops from 100 to 0
    }
    SUBCASE("min_samples_leaf blocks undersized children") {
        Eigen::MatrixXd X(4, 1);
        X << 0, 1, 2, 3;
        Eigen::VectorXd y(4);
        y << 0, 0, 0, 10;
        const auto split = best_split(X, y, iota_rows(4), iota_features(1), 2);
        REQUIRE(split.has_value());
        CHECK(split->threshold == doctest::Approx(1.5));
    }
}

TEST_CASE("best_split equals the exhaustive oracle on 50 seeded instances") {
    Rng rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 12;
        const int p = 3;
        const Eigen::MatrixXd X = random_matrix(n, p, rng);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) y[i] = rng.normal();
        const auto got = best_split(X, y, iota_rows(n), iota_features(p), 1);
        const auto want = oracle::exhaustive_best_split(X, y, 1);
        REQUIRE(got.has_value() == want.found);
        if (want.found) {
            CHECK(got->feature == want.feature);
            CHECK(got->threshold == want.threshold);
            CHECK(got->gain == doctest::Approx(want.gain).epsilon(1e-9));
        }
    }
}

TEST_CASE("grow_tree depth and leaf contracts") {
    Rng rng(7);
    const Eigen::MatrixXd X = random_matrix(10, 2, rng);
    Eigen::VectorXd y(10);
    for (int i = 0; i < 10; ++i) y[i] = rng.normal();

    SUBCASE("max_depth 0 is a single mean leaf") {
        const RegressionTree t = grow_tree(X, y, iota_rows(10), TreeConfig{0, 1});
        REQUIRE(t.nodes.size() == 1);
        CHECK(t.nodes[0].is_leaf());
        CHECK(t.nodes[0].value == doctest::Approx(y.mean()).epsilon(1e-15));
        CHECK(t.nodes[0].n_samples == 10);
    }
    SUBCASE("second-order single leaf takes -G/(H+lambda)") {
        const Eigen::VectorXd pred = Eigen::VectorXd::Zero(10);
        const Eigen::VectorXd g = pred - y;
        const Eigen::VectorXd h = Eigen::VectorXd::Ones(10);
        const double lambda = 2.5;
        const RegressionTree t = grow_tree_gh(X, g, h, iota_rows(10), TreeConfig{0, 1}, lambda);
        REQUIRE(t.nodes.size() == 1);
        CHECK(t.nodes[0].value == doctest::Approx(-g.sum() / (10.0 + lambda)).epsilon(1e-15));
    }
}

TEST_CASE("grow_tree matches a recursive greedy oracle at depth 2") {
    Rng rng(13);
    const int n = 10;
    const Eigen::MatrixXd X = random_matrix(n, 2, rng);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = rng.normal();

    const RegressionTree tree = grow_tree(X, y, iota_rows(n), TreeConfig{2, 1});

    // Replay the greedy recursion with the exhaustive oracle.
    struct Frame {
        std::vector<int> rows;
        int node;
        int depth;
    };
    std::vector<Frame> work{{iota_rows(n), 0, 0}};
    while (!work.empty()) {
        const Frame f = work.back();
        work.pop_back();
        Eigen::MatrixXd Xs(static_cast<Eigen::Index>(f.rows.size()), 2);
        Eigen::VectorXd ys(static_cast<Eigen::Index>(f.rows.size()));
        for (std::size_t i = 0; i < f.rows.size(); ++i) {
            Xs.row(static_cast<Eigen::Index>(i)) = X.row(f.rows[i]);
            ys[static_cast<Eigen::Index>(i)] = y[f.rows[i]];
        }
        const TreeNode& node = tree.nodes[static_cast<std::size_t>(f.node)];
        CHECK(node.n_samples == static_cast<int>(f.rows.size()));
        if (f.depth >= 2 || f.rows.size() < 2) {
            CHECK(node.is_leaf());
            continue;
        }
        const auto want = oracle::exhaustive_best_split(Xs, ys, 1);
        if (!want.found) {
            CHECK(node.is_leaf());
            continue;
        }
        REQUIRE_FALSE(node.is_leaf());
        CHECK(node.feature == want.feature);
        CHECK(node.threshold == doctest::Approx(want.threshold).epsilon(1e-12));
        Frame left{{}, node.left, f.depth + 1};
        Frame right{{}, node.right, f.depth + 1};
        for (int r : f.rows) {
            (X(r, node.feature) <= node.threshold ? left.rows : right.rows).push_back(r);
        }
        work.push_back(left);
        work.push_back(right);
    }
}

TEST_CASE("training predictions are piecewise constant leaf values") {
    Rng rng(17);
    const Eigen::MatrixXd X = random_matrix(40, 3, rng);
    Eigen::VectorXd y(40);
    for (int i = 0; i < 40; ++i) y[i] = X(i, 0) + rng.normal();
    const RegressionTree t = grow_tree(X, y, iota_rows(40), TreeConfig{4, 2});
    for (int i = 0; i < 40; ++i) {
        int node = 0;
        while (!t.nodes[static_cast<std::size_t>(node)].is_leaf()) {
            const TreeNode& nd = t.nodes[static_cast<std::size_t>(node)];
            node = X(i, nd.feature) <= nd.threshold ? nd.left : nd.right;
        }
        CHECK(t.predict_row(X.row(i)) == t.nodes[static_cast<std::size_t>(node)].value);
    }
}

TEST_CASE("forest degenerate configurations") {
    Rng rng(19);
    const Eigen::MatrixXd X = random_matrix(25, 3, rng);
    Eigen::VectorXd y(25);
    for (int i = 0; i < 25; ++i) y[i] = X(i, 1) + 0.2 * rng.normal();

    SUBCASE("one tree, all features, no bootstrap equals a single grow_tree") {
        ForestConfig cfg;
        cfg.n_trees = 1;
        cfg.mtry = 3;
        cfg.bootstrap = false;
        cfg.min_samples_leaf = 2;
        const ForestModel forest = fit_random_forest(X, y, cfg, 5);
        const RegressionTree single = grow_tree(X, y, iota_rows(25), TreeConfig{cfg.max_depth, 2});
        REQUIRE(forest.trees.size() == 1);
        CHECK(same_tree(forest.trees[0], single));
    }
    SUBCASE("same seed gives bit-identical forests") {
        ForestConfig cfg;
        cfg.n_trees = 12;
        const ForestModel a = fit_random_forest(X, y, cfg, 77);
        const ForestModel b = fit_random_forest(X, y, cfg, 77);
        REQUIRE(a.trees.size() == b.trees.size());
        for (std::size_t t = 0; t < a.trees.size(); ++t) CHECK(same_tree(a.trees[t], b.trees[t]));
        const ForestModel c = fit_random_forest(X, y, cfg, 78);
        bool all_same = true;
        for (std::size_t t = 0; t < a.trees.size(); ++t) {
            all_same = all_same && same_tree(a.trees[t], c.trees[t]);
        }
        CHECK_FALSE(all_same);
    }
    SUBCASE("forest results do not depend on the thread count") {
        ForestConfig cfg;
        cfg.n_trees = 8;
        set_thread_count(1);
        const ForestModel a = fit_random_forest(X, y, cfg, 3);
        set_thread_count(2);
        const ForestModel b = fit_random_forest(X, y, cfg, 3);
        set_thread_count(0);
        for (std::size_t t = 0; t < a.trees.size(); ++t) CHECK(same_tree(a.trees[t], b.trees[t]));
        CHECK(a.importances == b.importances);
    }
}

TEST_CASE("forest importances separate signal from noise") {
    int wins = 0;
    for (int seed = 0; seed < 100; ++seed) {
        Rng rng(1000 + static_cast<std::uint64_t>(seed));
        const int n = 60;
        Eigen::MatrixXd X = random_matrix(n, 2, rng);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) y[i] = 3.0 * X(i, 0) + 0.5 * rng.normal();
        ForestConfig cfg;
        cfg.n_trees = 25;
        cfg.mtry = 1;
        const ForestModel m = fit_random_forest(X, y, cfg, static_cast<std::uint64_t>(seed));
        CHECK(m.importances.sum() == doctest::Approx(1.0).epsilon(1e-9));
        if (m.importances[0] > m.importances[1]) ++wins;
    }
    CHECK(wins >= 95);
}

TEST_CASE("permuting an irrelevant feature leaves its importance marginal") {
    Rng rng(23);
    const int n = 120;
    Eigen::MatrixXd X = random_matrix(n, 3, rng);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = 2.0 * X(i, 0) + X(i, 1) + 0.3 * rng.normal();
    ForestConfig cfg;
    cfg.n_trees = 40;
    const ForestModel before = fit_random_forest(X, y, cfg, 9);

    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    Rng shuffler(31);
    shuffler.shuffle(perm);
    Eigen::MatrixXd Xp = X;
    for (int i = 0; i < n; ++i) Xp(i, 2) = X(perm[static_cast<std::size_t>(i)], 2);
    const ForestModel after = fit_random_forest(Xp, y, cfg, 9);

    const double smallest_signal = std::min(before.importances[0], before.importances[1]);
    CHECK(std::abs(after.importances[2] - before.importances[2]) < smallest_signal);
}

TEST_CASE("bagging is a forest with every feature in play") {
    Rng rng(29);
    const Eigen::MatrixXd X = random_matrix(30, 3, rng);
    Eigen::VectorXd y(30);
    for (int i = 0; i < 30; ++i) y[i] = X(i, 0) - X(i, 2) + 0.1 * rng.normal();

    const ForestModel bag = fit_bagging(X, y, 7, TreeConfig{}, 55);
    ForestConfig cfg;
    cfg.n_trees = 7;
    cfg.mtry = 3;
    const ForestModel forest = fit_random_forest(X, y, cfg, 55);
    REQUIRE(bag.trees.size() == forest.trees.size());
    for (std::size_t t = 0; t < bag.trees.size(); ++t) CHECK(same_tree(bag.trees[t], forest.trees[t]));

    // Prediction is the arithmetic mean of the member trees.
    Eigen::MatrixXd probe = random_matrix(5, 3, rng);
    const Eigen::VectorXd pred = bag.predict(probe);
    for (int i = 0; i < 5; ++i) {
        double sum = 0.0;
        for (const auto& tree : bag.trees) sum += tree.predict_row(probe.row(i));
        CHECK(pred[i] == doctest::Approx(sum / 7.0).epsilon(1e-15));
    }
}

TEST_CASE("bagged predictions vary less than single trees across seeds") {
    Rng data_rng(31);
    const int n = 80;
    const Eigen::MatrixXd X = random_matrix(n, 2, data_rng);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = std::sin(X(i, 0)) + 0.8 * data_rng.normal();
    Eigen::RowVectorXd query(2);
    query << 0.25, -0.5;

    std::vector<double> single, bagged;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        ForestConfig one;
        one.n_trees = 1;
        one.mtry = 2;
        single.push_back(fit_random_forest(X, y, one, seed).predict(query)[0]);
        bagged.push_back(fit_bagging(X, y, 10, TreeConfig{}, seed).predict(query)[0]);
    }
    auto variance = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return ss / static_cast<double>(v.size());
    };
    CHECK(variance(bagged) <= variance(single));
}

TEST_CASE("boosting round zero and degenerate rounds") {
    Rng rng(37);
    const Eigen::MatrixXd X = random_matrix(20, 2, rng);
    Eigen::VectorXd y(20);
    for (int i = 0; i < 20; ++i) y[i] = rng.normal(10.0, 3.0);

    for (const auto variant : {BoostConfig::Variant::kClassic, BoostConfig::Variant::kSecondOrder,
                               BoostConfig::Variant::kHistogram}) {
        BoostConfig cfg;
        cfg.variant = variant;
        cfg.n_rounds = 1;
        cfg.max_depth = 0;
        cfg.max_leaves = 1;
        cfg.learning_rate = 1.0;
        cfg.lambda_reg = 0.0;
        const BoostedModel m = fit_boosted(X, y, cfg, 0);
        CHECK(m.base_score == doctest::Approx(y.mean()).epsilon(1e-15));
        // A single depth-0 tree fits the zero residual, so predictions stay
        // at the mean.
        const Eigen::VectorXd pred = m.predict(X);
        for (int i = 0; i < 20; ++i) CHECK(pred[i] == doctest::Approx(y.mean()).epsilon(1e-12));
    }
}

TEST_CASE("classic boosting training error never increases") {
    Rng rng(41);
    const int n = 60;
    const Eigen::MatrixXd X = random_matrix(n, 3, rng);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        y[i] = 2.0 * X(i, 0) - X(i, 1) * X(i, 2) + 0.5 * rng.normal();
    }
    BoostConfig cfg;
    cfg.n_rounds = 50;
    cfg.max_depth = 2;
    cfg.learning_rate = 0.3;
    const BoostedModel m = fit_boosted(X, y, cfg, 0);

    Eigen::VectorXd pred = Eigen::VectorXd::Constant(n, m.base_score);
    double prev = (y - pred).squaredNorm() / n;
    for (const auto& tree : m.trees) {
        pred += m.learning_rate * tree.predict(X);
        const double cur = (y - pred).squaredNorm() / n;
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
}

TEST_CASE("histogram splits match exact splits when bins cover all values") {
    Rng rng(43);
    const int n = 40;
    const Eigen::MatrixXd X = random_matrix(n, 3, rng);
    Eigen::VectorXd g(n), h = Eigen::VectorXd::Ones(n);
    for (int i = 0; i < n; ++i) g[i] = rng.normal();
    const double lambda = 1.0;

    const BinnedFeatures bins = bin_features(X, 64);  // 64 > 40 distinct values
    const RegressionTree hist_tree =
        grow_histogram_tree(bins, g, h, iota_rows(n), 2, 1, lambda);
    const auto exact = best_split_gh(X, g, h, iota_rows(n), iota_features(3), 1, lambda);

    REQUIRE(exact.has_value());
    REQUIRE_FALSE(hist_tree.nodes[0].is_leaf());
    CHECK(hist_tree.nodes[0].feature == exact->feature);
    CHECK(hist_tree.nodes[0].threshold == doctest::Approx(exact->threshold).epsilon(1e-12));
    CHECK(hist_tree.nodes[0].gain == doctest::Approx(exact->gain).epsilon(1e-9));
}

TEST_CASE("histogram splits only occur at bin edges") {
    Rng rng(47);
    const int n = 300;
    const Eigen::MatrixXd X = random_matrix(n, 2, rng);
    Eigen::VectorXd g(n), h = Eigen::VectorXd::Ones(n);
    for (int i = 0; i < n; ++i) g[i] = rng.normal();
    const BinnedFeatures bins = bin_features(X, 16);
    for (const auto& edges : bins.edges) CHECK(edges.size() <= 15);
    const RegressionTree t = grow_histogram_tree(bins, g, h, iota_rows(n), 8, 1, 1.0);
    for (const auto& node : t.nodes) {
        if (node.is_leaf()) continue;
        const auto& edges = bins.edges[static_cast<std::size_t>(node.feature)];
        const bool at_edge = std::find(edges.begin(), edges.end(), node.threshold) != edges.end();
        CHECK(at_edge);
    }
}

TEST_CASE("ensemble predict identities") {
    SUBCASE("boosted model with no trees returns the base score") {
        BoostedModel m;
        m.base_score = 4.5;
        const Eigen::VectorXd out = m.predict(Eigen::MatrixXd::Random(3, 2));
        for (int i = 0; i < 3; ++i) CHECK(out[i] == 4.5);
    }
    SUBCASE("forest of identical stumps predicts the stump value") {
        Eigen::MatrixXd X(4, 1);
        X << 0, 1, 2, 3;
        Eigen::VectorXd y(4);
        y << 5, 5, 5, 5;
        ForestConfig cfg;
        cfg.n_trees = 6;
        cfg.bootstrap = false;
        cfg.mtry = 1;
        const ForestModel m = fit_random_forest(X, y, cfg, 0);
        const Eigen::VectorXd out = m.predict(X);
        for (int i = 0; i < 4; ++i) CHECK(out[i] == 5.0);
    }
    SUBCASE("batch prediction equals the per-row loop") {
        Rng rng(53);
        const Eigen::MatrixXd X = random_matrix(30, 2, rng);
        Eigen::VectorXd y(30);
        for (int i = 0; i < 30; ++i) y[i] = rng.normal();
        BoostConfig cfg;
        cfg.n_rounds = 10;
        const BoostedModel m = fit_boosted(X, y, cfg, 0);
        const Eigen::VectorXd batch = m.predict(X);
        for (int i = 0; i < 30; ++i) {
            double tree_sum = 0.0;
            for (const auto& tree : m.trees) tree_sum += tree.predict_row(X.row(i));
            CHECK(batch[i] == m.base_score + m.learning_rate * tree_sum);
        }
    }
}
