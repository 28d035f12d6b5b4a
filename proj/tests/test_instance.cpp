#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <numeric>

#include "ozonecast/errors.hpp"
#include "ozonecast/knn.hpp"
#include "ozonecast/rng.hpp"
#include "ozonecast/svr.hpp"
#include "oracles.hpp"

using namespace ozonecast;

namespace {
Eigen::MatrixXd random_matrix(int n, int p, Rng& rng) {
    Eigen::MatrixXd X(n, p);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
    }
    return X;
}
}  // namespace

TEST_CASE("knn degenerate and boundary cases") {
    Rng rng(3);
    const Eigen::MatrixXd X = random_matrix(10, 2, rng);
    Eigen::VectorXd y(10);
    for (int i = 0; i < 10; ++i) y[i] = rng.normal(5.0, 2.0);

    const KnnModel one = fit_knn(X, y, 1);
    for (int i = 0; i < 10; ++i) {
        CHECK(one.predict_row(X.row(i)) == y[i]);  // exact training point
    }
    const KnnModel all = fit_knn(X, y, 10);
    CHECK(all.predict_row(X.row(0)) == doctest::Approx(y.mean()).epsilon(1e-15));

    CHECK_THROWS_AS(fit_knn(X, y, 11), FitError);
    CHECK_THROWS_AS(fit_knn(X, y, 0), FitError);
    CHECK_THROWS_AS(one.predict(Eigen::MatrixXd::Random(2, 5)), PredictError);
}

TEST_CASE("knn matches the brute-force oracle exactly") {
    Rng rng(7);
    const Eigen::MatrixXd X = random_matrix(50, 3, rng);
    Eigen::VectorXd y(50);
    for (int i = 0; i < 50; ++i) y[i] = rng.normal();
    const KnnModel m = fit_knn(X, y, 5);
    for (int q = 0; q < 20; ++q) {
        Eigen::RowVectorXd query(3);
        query << rng.normal(), rng.normal(), rng.normal();
        CHECK(m.predict_row(query) == oracle::knn_brute_force(X, y, query, 5));
    }
}

TEST_CASE("knn prediction is invariant under training-row permutation") {
    Rng rng(11);
    const Eigen::MatrixXd X = random_matrix(30, 2, rng);
    Eigen::VectorXd y(30);
    for (int i = 0; i < 30; ++i) y[i] = rng.normal();
    const KnnModel a = fit_knn(X, y, 4);

    std::vector<int> perm(30);
    std::iota(perm.begin(), perm.end(), 0);
    Rng shuffler(99);
    shuffler.shuffle(perm);
    Eigen::MatrixXd Xp(30, 2);
    Eigen::VectorXd yp(30);
    for (int i = 0; i < 30; ++i) {
        Xp.row(i) = X.row(perm[static_cast<std::size_t>(i)]);
        yp[i] = y[perm[static_cast<std::size_t>(i)]];
    }
    const KnnModel b = fit_knn(Xp, yp, 4);
    for (int q = 0; q < 10; ++q) {
        Eigen::RowVectorXd query(2);
        query << rng.normal(), rng.normal();
        // Distinct random distances make the tie rule irrelevant here.
        CHECK(a.predict_row(query) == doctest::Approx(b.predict_row(query)).epsilon(1e-12));
    }
}

TEST_CASE("svr with a huge tube needs no support vectors") {
    Rng rng(13);
    const Eigen::MatrixXd X = random_matrix(20, 2, rng);
    Eigen::VectorXd y(20);
    for (int i = 0; i < 20; ++i) y[i] = rng.uniform(10.0, 12.0);
    SvrConfig cfg;
    cfg.epsilon = (y.maxCoeff() - y.minCoeff()) * 1.5;
    const SvrModel m = fit_svr(X, y, cfg);
    CHECK(m.dual_coef.cwiseAbs().maxCoeff() == 0.0);
    CHECK(m.converged);
    const Eigen::VectorXd pred = m.predict(X);
    for (int i = 0; i < 20; ++i) {
        CHECK(pred[i] == m.bias);
        CHECK(std::abs(pred[i] - y[i]) <= cfg.epsilon);
    }
}

TEST_CASE("svr box collapse: C -> 0 keeps all duals at zero") {
    Rng rng(17);
    const Eigen::MatrixXd X = random_matrix(15, 2, rng);
    Eigen::VectorXd y(15);
    for (int i = 0; i < 15; ++i) y[i] = rng.normal(30.0, 9.0);
    SvrConfig cfg;
    cfg.c = 1e-16;
    const SvrModel m = fit_svr(X, y, cfg);
    CHECK(m.dual_coef.cwiseAbs().maxCoeff() == 0.0);
    CHECK(m.support_beta.size() == 0);
}

TEST_CASE("svr satisfies KKT conditions on seeded problems") {
    Rng rng(19);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 30;
        const Eigen::MatrixXd X = random_matrix(n, 3, rng);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) y[i] = X(i, 0) - 0.5 * X(i, 1) + 0.2 * rng.normal();
        SvrConfig cfg;
        cfg.tol = 1e-3;
        cfg.max_passes = 200;
        const SvrModel m = fit_svr(X, y, cfg);
        CHECK(m.converged);
        const double kkt = oracle::svr_kkt_residual(X, y, m.dual_coef, m.bias, cfg.c, cfg.epsilon,
                                                    true, m.gamma_used);
        CHECK(kkt <= cfg.tol + 1e-9);
    }
}

TEST_CASE("svr points strictly inside the tube have zero duals") {
    Rng rng(23);
    const int n = 40;
    const Eigen::MatrixXd X = random_matrix(n, 2, rng);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = 0.8 * X(i, 0) + 0.1 * rng.normal();
    SvrConfig cfg;
    cfg.tol = 1e-4;
    cfg.max_passes = 300;
    const SvrModel m = fit_svr(X, y, cfg);
    const Eigen::VectorXd pred = m.predict(X);
    for (int i = 0; i < n; ++i) {
        if (std::abs(pred[i] - y[i]) < cfg.epsilon - cfg.tol) {
            CHECK(m.dual_coef[i] == 0.0);
        }
    }
}

TEST_CASE("svr predict identities") {
    SvrConfig cfg;
    cfg.kernel = SvrConfig::Kernel::kRbf;
    SUBCASE("zero duals give the bias") {
        SvrModel m;
        m.config = cfg;
        m.gamma_used = 0.5;
        m.bias = 3.25;
        m.support_X.resize(0, 2);
        m.support_beta.resize(0);
        const Eigen::VectorXd out = m.predict(Eigen::MatrixXd::Random(4, 2));
        for (int i = 0; i < 4; ++i) CHECK(out[i] == 3.25);
    }
    SUBCASE("rbf kernel of a point with itself is 1") {
        SvrModel m;
        m.config = cfg;
        m.gamma_used = 0.7;
        m.bias = 0.0;
        m.support_X.resize(1, 3);
        m.support_X << 1.0, -2.0, 0.5;
        m.support_beta.resize(1);
        m.support_beta << 1.0;
        CHECK(m.predict(m.support_X)[0] == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("linear kernel reproduces w.x + b") {
        Rng rng(29);
        const Eigen::MatrixXd X = random_matrix(12, 2, rng);
        Eigen::VectorXd beta(12);
        for (int i = 0; i < 12; ++i) beta[i] = rng.normal();
        SvrModel m;
        m.config.kernel = SvrConfig::Kernel::kLinear;
        m.bias = 0.75;
        m.support_X = X;
        m.support_beta = beta;
        const Eigen::RowVectorXd w = beta.transpose() * X;  // representer weights
        Eigen::MatrixXd probe = random_matrix(5, 2, rng);
        const Eigen::VectorXd pred = m.predict(probe);
        for (int i = 0; i < 5; ++i) {
            CHECK(pred[i] == doctest::Approx(w.dot(probe.row(i)) + 0.75).epsilon(1e-12));
        }
    }
}

TEST_CASE("rbf gram matrix is positive semidefinite") {
    Rng rng(31);
    const Eigen::MatrixXd X = random_matrix(25, 4, rng);
    const double gamma = svr_default_gamma(X);
    Eigen::MatrixXd K(25, 25);
    for (int i = 0; i < 25; ++i) {
        for (int j = 0; j < 25; ++j) {
            K(i, j) = std::exp(-gamma * (X.row(i) - X.row(j)).squaredNorm());
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-8);
}

TEST_CASE("svr rejects bad configurations") {
    Eigen::MatrixXd X(3, 1);
    X << 1, 2, 3;
    Eigen::VectorXd y(3);
    y << 1, 2, 3;
    SvrConfig bad;
    bad.c = 0.0;
    CHECK_THROWS_AS(fit_svr(X, y, bad), FitError);
    bad.c = 1.0;
    bad.epsilon = -1.0;
    CHECK_THROWS_AS(fit_svr(X, y, bad), FitError);
}
