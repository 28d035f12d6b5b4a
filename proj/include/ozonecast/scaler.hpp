#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "ozonecast/table.hpp"

namespace ozonecast {

/// Per-column standardization fitted on training rows only. Uses the
/// sample (n-1) standard deviation. Columns with zero spread are flagged
/// degenerate and map to 0.
struct Scaler {
    std::vector<std::string> names;
    Eigen::VectorXd mean;
    Eigen::VectorXd sd;
    std::vector<bool> degenerate;

    /// z = (x - mean) / sd per column; X columns must align with names.
    Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const;

    /// x = z * sd + mean; degenerate columns recover the mean.
    Eigen::MatrixXd inverse(const Eigen::MatrixXd& Z) const;
};

/// Fit over the given rows of a matrix whose columns carry `names`.
Scaler fit_scaler(const Eigen::MatrixXd& X, const std::vector<std::string>& names,
                  std::span<const int> rows);

/// Fit over training rows of the named table columns.
Scaler fit_scaler(const TimeSeriesTable& table, std::span<const int> train_rows,
                  const std::vector<std::string>& columns);

/// Standardize the scaler's columns read from a table (all rows).
/// Missing columns raise SchemaError.
Eigen::MatrixXd apply_scaler(const Scaler& scaler, const TimeSeriesTable& table);

/// Standardize a matrix whose columns align with the scaler.
Eigen::MatrixXd apply_scaler(const Scaler& scaler, const Eigen::MatrixXd& X);

}  // namespace ozonecast
