#pragma once

#include <Eigen/Dense>

#include "ozonecast/model.hpp"

namespace ozonecast {

struct SvrConfig {
    enum class Kernel { kRbf, kLinear };
    Kernel kernel = Kernel::kRbf;
    double c = 1.0;
    double epsilon = 0.1;
    double gamma = -1.0;  // <= 0: 1 / (p * var(X)), resolved at fit time
    double tol = 1e-3;    // maximum allowed KKT violation
    int max_passes = 50;  // sweep budget, each sweep is up to n pair updates
};

/// Epsilon-insensitive support vector regression trained by pairwise
/// (SMO-style) coordinate updates on the dual. Only rows with a nonzero
/// dual coefficient are retained for prediction.
class SvrModel : public Regressor {
  public:
    Eigen::MatrixXd support_X;
    Eigen::VectorXd support_beta;  // alpha - alpha*, in [-C, C]
    Eigen::VectorXd dual_coef;     // full per-training-point coefficients
    double bias = 0.0;
    SvrConfig config;
    double gamma_used = 0.0;
    bool converged = true;
    double final_violation = 0.0;  // max KKT violation at termination

    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const override;
    bool fit_converged() const override { return converged; }
};

SvrModel fit_svr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const SvrConfig& config = {});

/// Resolves the default RBF width for a given design matrix.
double svr_default_gamma(const Eigen::MatrixXd& X);

}  // namespace ozonecast
