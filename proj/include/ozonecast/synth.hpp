#pragma once

#include <cstdint>
#include <span>

#include "ozonecast/table.hpp"

namespace ozonecast {

/// Seeded synthetic daily dataset with the real schema: an annual cycle,
/// a weekday effect and one pairwise product (TMP x RH) planted in the
/// target, plus four signal-carrying predictors (TMP, RH, PM2.5, NO) and
/// autocorrelated noise. The noise component is calibrated so the
/// generated target's lag-1 autocorrelation lands on `ar`.
struct SynthConfig {
    int rows = 1200;
    std::uint64_t seed = 1;
    double ar = 0.7;              // requested target lag-1 autocorrelation
    double season_amp = 0.65;     // annual-cycle weight in the target
    double weekday_amp = 0.40;    // weekday-pattern weight
    double interaction_amp = 0.55;  // TMP x RH product weight
    double linear_amp = 0.45;     // PM2.5 + NO linear weight
    double target_mean = 30.5;
    double target_sd = 9.0;
    Date start{2015, 1, 1};
};

TimeSeriesTable synth_table(const SynthConfig& config = {});

/// Standard lag-1 autocorrelation estimator
/// sum (x_t - m)(x_{t+1} - m) / sum (x_t - m)^2.
double lag1_autocorr(std::span<const double> x);

}  // namespace ozonecast
