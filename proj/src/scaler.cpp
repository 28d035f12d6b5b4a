#include "ozonecast/scaler.hpp"

#include <cmath>

#include "ozonecast/errors.hpp"

namespace ozonecast {

Eigen::MatrixXd Scaler::transform(const Eigen::MatrixXd& X) const {
    if (X.cols() != mean.size()) {
        throw SchemaError("scaler fitted on " + std::to_string(mean.size()) +
                          " columns, input has " + std::to_string(X.cols()));
    }
    Eigen::MatrixXd Z(X.rows(), X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        if (degenerate[static_cast<std::size_t>(j)]) {
            Z.col(j).setZero();
        } else {
            Z.col(j) = (X.col(j).array() - mean[j]) / sd[j];
        }
    }
    return Z;
}

Eigen::MatrixXd Scaler::inverse(const Eigen::MatrixXd& Z) const {
    if (Z.cols() != mean.size()) {
        throw SchemaError("scaler fitted on " + std::to_string(mean.size()) +
                          " columns, input has " + std::to_string(Z.cols()));
    }
    Eigen::MatrixXd X(Z.rows(), Z.cols());
    for (Eigen::Index j = 0; j < Z.cols(); ++j) {
        if (degenerate[static_cast<std::size_t>(j)]) {
            X.col(j).setConstant(mean[j]);
        } else {
            X.col(j) = Z.col(j).array() * sd[j] + mean[j];
        }
    }
    return X;
}

Scaler fit_scaler(const Eigen::MatrixXd& X, const std::vector<std::string>& names,
                  std::span<const int> rows) {
    if (rows.size() < 2) throw Error("scaler requires at least 2 training rows");
    const auto n = static_cast<double>(rows.size());
    Scaler s;
    s.names = names;
    s.mean.resize(X.cols());
    s.sd.resize(X.cols());
    s.degenerate.assign(static_cast<std::size_t>(X.cols()), false);
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        double sum = 0.0;
        for (int i : rows) sum += X(i, j);
        const double mean = sum / n;
        double ss = 0.0;
        for (int i : rows) {
            const double d = X(i, j) - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / (n - 1.0));
        s.mean[j] = mean;
        s.sd[j] = sd;
        s.degenerate[static_cast<std::size_t>(j)] = (sd == 0.0);
    }
    return s;
}

namespace {
Eigen::MatrixXd gather_columns(const TimeSeriesTable& table,
                               const std::vector<std::string>& columns) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(table.n_rows()),
                      static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        const auto& col = table.col(columns[j]);  // SchemaError if absent
        for (std::size_t i = 0; i < table.n_rows(); ++i) {
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
        }
    }
    return X;
}
}  // namespace

Scaler fit_scaler(const TimeSeriesTable& table, std::span<const int> train_rows,
                  const std::vector<std::string>& columns) {
    return fit_scaler(gather_columns(table, columns), columns, train_rows);
}

Eigen::MatrixXd apply_scaler(const Scaler& scaler, const TimeSeriesTable& table) {
    return scaler.transform(gather_columns(table, scaler.names));
}

Eigen::MatrixXd apply_scaler(const Scaler& scaler, const Eigen::MatrixXd& X) {
    return scaler.transform(X);
}

}  // namespace ozonecast
