#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ozonecast/linear.hpp"
#include "ozonecast/model.hpp"

namespace ozonecast {

/// Trains one base model on (X, y) with a derived seed.
using ModelFactory = std::function<std::unique_ptr<Regressor>(
    const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::uint64_t seed)>;

struct BaseSpec {
    std::string name;
    ModelFactory fit;
};

/// K-fold stacking: the OLS meta-regressor is fitted only on out-of-fold
/// base predictions; bases are then refitted on the full training data
/// for inference.
class StackingModel : public Regressor {
  public:
    std::vector<std::string> base_names;
    std::vector<std::unique_ptr<Regressor>> bases;  // full-data refits
    LinearModel meta;
    int k_folds = 5;

    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const override;
};

struct StackingFit {
    StackingModel model;
    Eigen::MatrixXd oof;                  // n x m out-of-fold predictions
    std::vector<int> fold_of_row;         // fold id per training row
};

/// `record_oof` keeps the out-of-fold matrix and fold tags for
/// inspection; the model itself is identical either way.
StackingFit fit_stacking(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const std::vector<BaseSpec>& bases, int k_folds, std::uint64_t seed);

}  // namespace ozonecast
