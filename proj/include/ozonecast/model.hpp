#pragma once

#include <Eigen/Dense>

namespace ozonecast {

/// Uniform contract every regressor satisfies: a trained, immutable model
/// that maps a feature matrix to one prediction per row.
class Regressor {
  public:
    virtual ~Regressor() = default;
    virtual Eigen::VectorXd predict(const Eigen::MatrixXd& X) const = 0;

    /// False when an iterative fit exhausted its budget before meeting its
    /// tolerance; predictions remain usable.
    virtual bool fit_converged() const { return true; }
};

}  // namespace ozonecast
