#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ozonecast/ensemble.hpp"
#include "ozonecast/scaler.hpp"
#include "ozonecast/table.hpp"

namespace ozonecast {

/// Fixed-order feature matrix with aligned target and dates. The
/// contemporaneous target column never appears among the features.
struct FeatureSet {
    std::vector<std::string> names;
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<Date> dates;
};

/// The four feature regimes:
///   1: the eleven raw predictors
///   2: predictors + 4 temporal columns + all 55 pairwise products
///   3: top_k importance-selected predictors (+ temporal, unless disabled)
///   4: selection + temporal + target lags; the first max(lag) rows drop
struct ApproachSpec {
    int id = 1;
    int top_k = 4;
    std::vector<int> lags = {1, 3};
    std::optional<std::vector<std::string>> selected;  // overrides ranking
    bool temporal_with_selection = true;
    ForestConfig rank_forest = {};  // forest used by the importance ranking
};

/// year, month, day, day_of_week (Monday = 0) as real-valued columns.
Eigen::MatrixXd temporal_features(const std::vector<Date>& dates);
const std::vector<std::string>& temporal_feature_names();

/// Appends one product column per unordered pair (i < j), named "A*B";
/// no squared terms, base columns retained.
void interaction_features(Eigen::MatrixXd& X, std::vector<std::string>& names,
                          int n_base_columns);

/// Lagged copies of the target: column "O3_lag_k"[t] = y[t-k]. Returns the
/// lag matrix aligned to rows max(lags)..n-1 and the number of dropped
/// leading rows. Lags must be >= 1 and < n.
struct LagResult {
    Eigen::MatrixXd columns;
    std::vector<std::string> names;
    int dropped = 0;
};
LagResult lag_features(const Eigen::VectorXd& y, const std::vector<int>& lags);

struct RankedFeature {
    std::string name;
    double importance;
};

/// Forest mean-decrease-in-impurity ranking of training features,
/// normalized to sum 1, sorted descending (ties keep input order).
std::vector<RankedFeature> rank_features(const Eigen::MatrixXd& X_train,
                                         const Eigen::VectorXd& y_train,
                                         const std::vector<std::string>& names,
                                         const ForestConfig& config, std::uint64_t seed);

struct ApproachBuild {
    FeatureSet train;
    FeatureSet test;
    Scaler scaler;                        // fitted on train rows only
    std::vector<RankedFeature> ranking;   // approaches 3-4, else empty
};

/// Assembles the requested regime, splits, fits the scaler on the train
/// rows and standardizes both sides. Requires a gap-free table.
ApproachBuild build_approach(const TimeSeriesTable& table, const ApproachSpec& spec,
                             const SplitSpec& split_spec, std::uint64_t seed);

/// The eleven predictor names (schema minus the target).
std::vector<std::string> predictor_names();

}  // namespace ozonecast
