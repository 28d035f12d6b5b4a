#include "ozonecast/stacking.hpp"

#include <numeric>

#include "ozonecast/errors.hpp"
#include "ozonecast/rng.hpp"

namespace ozonecast {

Eigen::VectorXd StackingModel::predict(const Eigen::MatrixXd& X) const {
    Eigen::MatrixXd meta_X(X.rows(), static_cast<Eigen::Index>(bases.size()));
    for (std::size_t b = 0; b < bases.size(); ++b) {
        meta_X.col(static_cast<Eigen::Index>(b)) = bases[b]->predict(X);
    }
    return meta.predict(meta_X);
}

StackingFit fit_stacking(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const std::vector<BaseSpec>& bases, int k_folds, std::uint64_t seed) {
    if (bases.size() < 2) throw FitError("fit_stacking requires >= 2 base models");
    if (k_folds < 2) throw FitError("fit_stacking requires K >= 2");
    const Eigen::Index n = X.rows();
    if (n < k_folds) throw FitError("fit_stacking: fewer rows than folds");
    if (X.rows() != y.size()) throw FitError("fit_stacking: row count mismatch");

    // Seeded shuffle, then contiguous chunks become folds.
    Rng rng(seed);
    const std::vector<int> perm = rng.permutation(static_cast<std::size_t>(n));
    StackingFit out;
    out.fold_of_row.assign(static_cast<std::size_t>(n), -1);
    std::vector<std::vector<int>> folds(static_cast<std::size_t>(k_folds));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto f = static_cast<int>((static_cast<long>(i) * k_folds) / n);
        folds[static_cast<std::size_t>(f)].push_back(perm[static_cast<std::size_t>(i)]);
        out.fold_of_row[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = f;
    }

    const auto m = static_cast<Eigen::Index>(bases.size());
    out.oof = Eigen::MatrixXd::Zero(n, m);
    const Rng master(seed);

    for (int f = 0; f < k_folds; ++f) {
        const std::vector<int>& hold = folds[static_cast<std::size_t>(f)];
        std::vector<int> rest;
        rest.reserve(static_cast<std::size_t>(n) - hold.size());
        for (Eigen::Index i = 0; i < n; ++i) {
            if (out.fold_of_row[static_cast<std::size_t>(i)] != f) rest.push_back(static_cast<int>(i));
        }
        Eigen::MatrixXd X_rest(static_cast<Eigen::Index>(rest.size()), X.cols());
        Eigen::VectorXd y_rest(static_cast<Eigen::Index>(rest.size()));
        for (std::size_t i = 0; i < rest.size(); ++i) {
            X_rest.row(static_cast<Eigen::Index>(i)) = X.row(rest[i]);
            y_rest[static_cast<Eigen::Index>(i)] = y[rest[i]];
        }
        Eigen::MatrixXd X_hold(static_cast<Eigen::Index>(hold.size()), X.cols());
        for (std::size_t i = 0; i < hold.size(); ++i) {
            X_hold.row(static_cast<Eigen::Index>(i)) = X.row(hold[i]);
        }

        for (Eigen::Index b = 0; b < m; ++b) {
            const std::uint64_t fit_seed =
                master.derive(1000 + static_cast<std::uint64_t>(b) * 97 +
                              static_cast<std::uint64_t>(f))
                    .seed();
            const auto fitted = bases[static_cast<std::size_t>(b)].fit(X_rest, y_rest, fit_seed);
            const Eigen::VectorXd pred = fitted->predict(X_hold);
            for (std::size_t i = 0; i < hold.size(); ++i) {
                out.oof(hold[i], b) = pred[static_cast<Eigen::Index>(i)];
            }
        }
    }

    out.model.k_folds = k_folds;
    out.model.meta = fit_ols(out.oof, y);
    for (Eigen::Index b = 0; b < m; ++b) {
        const std::uint64_t refit_seed =
            master.derive(5000 + static_cast<std::uint64_t>(b)).seed();
        out.model.base_names.push_back(bases[static_cast<std::size_t>(b)].name);
        out.model.bases.push_back(bases[static_cast<std::size_t>(b)].fit(X, y, refit_seed));
    }
    return out;
}

}  // namespace ozonecast
