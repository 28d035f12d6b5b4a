#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ozonecast/model.hpp"

namespace ozonecast {

struct LinearConfig {
    enum class Kind { kOls, kElasticNet };
    Kind kind = Kind::kOls;
    double lambda = 1.0;     // total penalty strength
    double l1_ratio = 0.5;   // alpha: 1 = lasso, 0 = ridge
    double tol = 1e-6;       // max coefficient change per sweep
    int max_iter = 10000;    // coordinate-descent sweeps
};

class LinearModel : public Regressor {
  public:
    Eigen::VectorXd weights;
    double intercept = 0.0;
    LinearConfig config;
    bool converged = true;
    std::vector<double> objective_trace;  // per-sweep, elastic net only

    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const override;
    bool fit_converged() const override { return converged; }
};

/// Least squares with intercept via a column-pivoted complete orthogonal
/// factorization; rank-deficient X yields the minimum-norm weights.
LinearModel fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// Cyclic coordinate descent on
///   (1/2n)|y - Xw - b|^2 + lambda * (a|w|_1 + (1-a)/2 |w|_2^2),
/// intercept unpenalized. Coordinates are visited in fixed order 0..p-1.
/// Failure to converge sets the model's converged flag, it is not fatal.
LinearModel fit_elastic_net(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            double lambda = 1.0, double l1_ratio = 0.5, double tol = 1e-6,
                            int max_iter = 10000);

/// Smallest lambda at which the elastic-net solution is all-zero:
/// max_j |x_j . (y - mean(y))| / (n * l1_ratio).
double elastic_net_lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              double l1_ratio);

}  // namespace ozonecast
