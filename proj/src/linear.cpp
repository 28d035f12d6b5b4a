#include "ozonecast/linear.hpp"

#include <cmath>
#include <limits>

#include "ozonecast/errors.hpp"

namespace ozonecast {

Eigen::VectorXd LinearModel::predict(const Eigen::MatrixXd& X) const {
    if (X.cols() != weights.size()) {
        throw PredictError("model has " + std::to_string(weights.size()) + " weights, input has " +
                           std::to_string(X.cols()) + " columns");
    }
    return (X * weights).array() + intercept;
}

LinearModel fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (X.rows() == 0 || X.cols() == 0) throw FitError("fit_ols: empty design matrix");
    if (X.rows() != y.size()) throw FitError("fit_ols: row count mismatch");
    if (X.rows() < 2) throw FitError("fit_ols requires n >= 2");

    const Eigen::RowVectorXd xm = X.colwise().mean();
    const double ym = y.mean();
    const Eigen::MatrixXd Xc = X.rowwise() - xm;
    const Eigen::VectorXd yc = y.array() - ym;

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Xc);
    LinearModel model;
    model.config.kind = LinearConfig::Kind::kOls;
    model.weights = cod.solve(yc);
    model.intercept = ym - xm.dot(model.weights);
    return model;
}

namespace {
inline double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}
}  // namespace

LinearModel fit_elastic_net(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                            double l1_ratio, double tol, int max_iter) {
    if (X.rows() == 0 || X.cols() == 0) throw FitError("fit_elastic_net: empty design matrix");
    if (X.rows() != y.size()) throw FitError("fit_elastic_net: row count mismatch");
    if (lambda < 0.0) throw FitError("fit_elastic_net: lambda must be >= 0");
    if (l1_ratio < 0.0 || l1_ratio > 1.0) throw FitError("fit_elastic_net: l1_ratio in [0,1]");

    const auto n = static_cast<double>(X.rows());
    const Eigen::Index p = X.cols();
    const Eigen::RowVectorXd xm = X.colwise().mean();
    const double ym = y.mean();
    const Eigen::MatrixXd Xc = X.rowwise() - xm;
    const Eigen::VectorXd yc = y.array() - ym;

    Eigen::VectorXd col_sq(p);  // x_j . x_j / n
    for (Eigen::Index j = 0; j < p; ++j) col_sq[j] = Xc.col(j).squaredNorm() / n;

    const double l1 = lambda * l1_ratio;
    const double l2 = lambda * (1.0 - l1_ratio);

    LinearModel model;
    model.config = {LinearConfig::Kind::kElasticNet, lambda, l1_ratio, tol, max_iter};
    model.weights = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd residual = yc;

    auto objective = [&]() {
        return residual.squaredNorm() / (2.0 * n) + l1 * model.weights.lpNorm<1>() +
               0.5 * l2 * model.weights.squaredNorm();
    };

    model.converged = false;
    for (int sweep = 0; sweep < max_iter; ++sweep) {
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            const double w_old = model.weights[j];
            const double denom = col_sq[j] + l2;
            if (denom == 0.0) {
                model.weights[j] = 0.0;
                continue;
            }
            const double rho = Xc.col(j).dot(residual) / n + col_sq[j] * w_old;
            const double w_new = soft_threshold(rho, l1) / denom;
            if (w_new != w_old) {
                residual += Xc.col(j) * (w_old - w_new);
                model.weights[j] = w_new;
                max_change = std::max(max_change, std::abs(w_new - w_old));
            }
        }
        model.objective_trace.push_back(objective());
        if (max_change < tol) {
            model.converged = true;
            break;
        }
    }
    model.intercept = ym - xm.dot(model.weights);
    return model;
}

double elastic_net_lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              double l1_ratio) {
    if (l1_ratio <= 0.0) return std::numeric_limits<double>::infinity();
    const Eigen::RowVectorXd xm = X.colwise().mean();
    const Eigen::MatrixXd Xc = X.rowwise() - xm;
    const Eigen::VectorXd yc = y.array() - y.mean();
    const double n = static_cast<double>(X.rows());
    return (Xc.transpose() * yc).cwiseAbs().maxCoeff() / (n * l1_ratio);
}

}  // namespace ozonecast
