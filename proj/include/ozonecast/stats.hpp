#pragma once

#include <Eigen/Dense>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ozonecast/table.hpp"

namespace ozonecast {

/// One row of the descriptive-statistics table. Skewness is Fisher g1,
/// kurtosis is excess g2 (normal data scores 0); both use the biased
/// central moments. Shapiro fields stay NaN until filled separately.
struct SummaryRow {
    double min = 0, mean = 0, max = 0, sd = 0;
    double skewness = 0, kurtosis = 0;
    double shapiro_w = std::numeric_limits<double>::quiet_NaN();
    double shapiro_p = std::numeric_limits<double>::quiet_NaN();
};

/// Moments of a column; n >= 2 or StatError. Constant input yields
/// sd = 0 and NaN skewness/kurtosis.
SummaryRow summary_stats(std::span<const double> values);

struct ShapiroResult {
    double w = 0;
    double p = 0;
};

/// Shapiro-Wilk normality test, Royston's AS R94 approximation.
/// Valid for 3 <= n <= 5000; zero spread raises StatError.
ShapiroResult shapiro_wilk(std::span<const double> values);

/// Average (mid) ranks, 1-based; ties share the mean of their positions.
std::vector<double> mid_ranks(std::span<const double> values);

/// Spearman rank correlation: Pearson correlation of mid-ranked values.
/// Length mismatch or zero rank variance raises StatError.
double spearman(std::span<const double> x, std::span<const double> y);

struct CorrelationMatrix {
    std::vector<std::string> labels;
    Eigen::MatrixXd values;  // symmetric, unit diagonal
};

/// Pairwise Spearman over the named columns; requires >= 2 columns and a
/// gap-free table. Pairs are computed independently (parallel-safe) and
/// written once, so results do not depend on evaluation order.
CorrelationMatrix correlation_matrix(const TimeSeriesTable& table,
                                     const std::vector<std::string>& columns);

}  // namespace ozonecast
