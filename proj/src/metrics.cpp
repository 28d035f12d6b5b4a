#include "ozonecast/metrics.hpp"

#include "ozonecast/errors.hpp"

namespace ozonecast {

double mse(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size()) throw MetricError("mse: length mismatch");
    if (actual.empty()) throw MetricError("mse: empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double d = actual[i] - predicted[i];
        sum += d * d;
    }
    return sum / static_cast<double>(actual.size());
}

double mse(const Eigen::VectorXd& actual, const Eigen::VectorXd& predicted) {
    return mse(std::span<const double>(actual.data(), static_cast<std::size_t>(actual.size())),
               std::span<const double>(predicted.data(),
                                       static_cast<std::size_t>(predicted.size())));
}

double r2(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size()) throw MetricError("r2: length mismatch");
    if (actual.empty()) throw MetricError("r2: empty input");
    double mean = 0.0;
    for (double a : actual) mean += a;
    mean /= static_cast<double>(actual.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double r = actual[i] - predicted[i];
        const double d = actual[i] - mean;
        ss_res += r * r;
        ss_tot += d * d;
    }
    if (ss_tot == 0.0) throw MetricError("r2: zero variance in actual");
    return 1.0 - ss_res / ss_tot;
}

double r2(const Eigen::VectorXd& actual, const Eigen::VectorXd& predicted) {
    return r2(std::span<const double>(actual.data(), static_cast<std::size_t>(actual.size())),
              std::span<const double>(predicted.data(),
                                      static_cast<std::size_t>(predicted.size())));
}

}  // namespace ozonecast
