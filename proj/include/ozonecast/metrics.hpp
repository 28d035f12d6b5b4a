#pragma once

#include <Eigen/Dense>
#include <span>

namespace ozonecast {

/// Mean squared error; lengths must match and be nonzero.
double mse(std::span<const double> actual, std::span<const double> predicted);
double mse(const Eigen::VectorXd& actual, const Eigen::VectorXd& predicted);

/// Coefficient of determination 1 - SS_res/SS_tot with SS_tot about the
/// mean of `actual`. Zero variance in `actual` raises MetricError.
double r2(std::span<const double> actual, std::span<const double> predicted);
double r2(const Eigen::VectorXd& actual, const Eigen::VectorXd& predicted);

}  // namespace ozonecast
