#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ozonecast/tree.hpp"

namespace ozonecast {

struct ForestConfig {
    int n_trees = 200;
    int mtry = 0;  // <= 0: ceil(p/3)
    int max_depth = std::numeric_limits<int>::max();
    int min_samples_leaf = 2;
    bool bootstrap = true;
};

/// Bootstrap-aggregated CART trees with per-split feature subsampling.
/// Per-tree seeds are derived from the master seed before any training
/// starts, so results are identical for any thread count.
class ForestModel : public Regressor {
  public:
    std::vector<RegressionTree> trees;
    Eigen::VectorXd importances;  // normalized MDI, sums to 1 (or all 0)
    ForestConfig config;
    int mtry_used = 0;
    std::uint64_t seed = 0;

    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const override;
};

ForestModel fit_random_forest(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              const ForestConfig& config = {}, std::uint64_t seed = 0);

/// Bagging = the same machinery with every feature available at every
/// split (mtry = p).
ForestModel fit_bagging(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int n_estimators,
                        const TreeConfig& base = {}, std::uint64_t seed = 0);

struct BoostConfig {
    enum class Variant {
        kClassic,       // trees fit to residuals, mean leaves
        kSecondOrder,   // gradient/hessian statistics, regularized gain
        kHistogram,     // pre-binned features, leaf-wise best-first growth
    };
    Variant variant = Variant::kClassic;
    int n_rounds = 300;
    double learning_rate = 0.1;
    int max_depth = 3;  // classic and second-order growth bound
    int min_samples_leaf = 1;
    double lambda_reg = 1.0;  // second-order and histogram variants
    int n_bins = 64;          // histogram variant
    int max_leaves = 31;      // histogram variant leaf budget (depth-free)
};

/// Sequential squared-error boosting: prediction is
/// base_score + learning_rate * sum of tree outputs.
class BoostedModel : public Regressor {
  public:
    double base_score = 0.0;
    double learning_rate = 0.1;
    std::vector<RegressionTree> trees;
    BoostConfig config;

    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const override;
};

BoostedModel fit_boosted(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const BoostConfig& config = {}, std::uint64_t seed = 0);

/// Quantile-binned feature codes for the histogram variant. Values map to
/// the index of the first edge >= value; a split at edges[f][b] sends
/// codes <= b left, matching the raw-value rule x <= threshold.
struct BinnedFeatures {
    std::vector<std::vector<double>> edges;           // per feature, ascending
    std::vector<std::vector<std::uint16_t>> codes;    // per feature, per row
};

BinnedFeatures bin_features(const Eigen::MatrixXd& X, int n_bins);

/// Single best-first histogram tree on gradient/hessian statistics;
/// exposed for direct testing against the exact engine.
RegressionTree grow_histogram_tree(const BinnedFeatures& bins, const Eigen::VectorXd& g,
                                   const Eigen::VectorXd& h, std::span<const int> rows,
                                   int max_leaves, int min_samples_leaf, double lambda);

}  // namespace ozonecast
