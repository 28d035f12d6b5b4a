#pragma once

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "ozonecast/model.hpp"
#include "ozonecast/rng.hpp"

namespace ozonecast {

struct TreeConfig {
    int max_depth = std::numeric_limits<int>::max();  // 0 grows a single leaf
    int min_samples_leaf = 2;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf prediction
    double gain = 0.0;   // split gain, 0 for leaves
    int n_samples = 0;
    bool is_leaf() const { return feature < 0; }
};

/// Binary CART regression tree; rows with x[feature] <= threshold go left.
class RegressionTree : public Regressor {
  public:
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict_row(const Eigen::RowVectorXd& x) const;
    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const override;

    /// Per-feature sum of split gains (unnormalized impurity decrease).
    void accumulate_importances(Eigen::VectorXd& into) const;
};

struct SplitResult {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

/// Exhaustive variance-reduction split search over the given features
/// (which must be in ascending order; ties in gain keep the earlier
/// feature, then the lower threshold). Thresholds are midpoints between
/// consecutive distinct sorted values. Returns nullopt when no split has
/// positive gain or min_samples_leaf cannot be met.
std::optional<SplitResult> best_split(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                      std::span<const int> rows, std::span<const int> features,
                                      int min_samples_leaf);

/// Same search on gradient/hessian statistics with the regularized gain
///   0.5 * (GL^2/(HL+lambda) + GR^2/(HR+lambda) - G^2/(H+lambda)).
std::optional<SplitResult> best_split_gh(const Eigen::MatrixXd& X, const Eigen::VectorXd& g,
                                         const Eigen::VectorXd& h, std::span<const int> rows,
                                         std::span<const int> features, int min_samples_leaf,
                                         double lambda);

/// Depth-first growth with mean-target leaves. When 0 < mtry < p and an
/// rng is supplied, each split considers a fresh random feature subset.
RegressionTree grow_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         std::span<const int> rows, const TreeConfig& config, int mtry = 0,
                         Rng* rng = nullptr);

/// Depth-first growth on gradient/hessian statistics; leaves take the
/// second-order weight -G/(H+lambda).
RegressionTree grow_tree_gh(const Eigen::MatrixXd& X, const Eigen::VectorXd& g,
                            const Eigen::VectorXd& h, std::span<const int> rows,
                            const TreeConfig& config, double lambda);

}  // namespace ozonecast
