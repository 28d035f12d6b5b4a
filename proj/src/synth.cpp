#include "ozonecast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ozonecast/errors.hpp"
#include "ozonecast/rng.hpp"

namespace ozonecast {

double lag1_autocorr(std::span<const double> x) {
    if (x.size() < 3) throw StatError("lag1_autocorr requires n >= 3");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double d = x[t] - mean;
        den += d * d;
        if (t + 1 < x.size()) num += d * (x[t + 1] - mean);
    }
    if (den == 0.0) throw StatError("lag1_autocorr: zero variance");
    return num / den;
}

namespace {

constexpr double kYear = 365.25;

double lag1_autocov(std::span<const double> x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double num = 0.0;
    for (std::size_t t = 0; t + 1 < x.size(); ++t) num += (x[t] - mean) * (x[t + 1] - mean);
    return num / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(x.size());
}

// Unit-variance, zero-mean AR(1) path.
std::vector<double> ar1_path(std::size_t n, double rho, Rng rng) {
    std::vector<double> u(n);
    double state = 0.0;
    for (int burn = 0; burn < 200; ++burn) state = rho * state + rng.normal();
    for (std::size_t t = 0; t < n; ++t) {
        state = rho * state + rng.normal();
        u[t] = state;
    }
    double mean = 0.0;
    for (double v : u) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : u) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    for (double& v : u) v = (v - mean) / (sd > 0.0 ? sd : 1.0);
    return u;
}

std::vector<double> standardized(const std::vector<double>& x) {
    std::vector<double> z(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - mean) / (sd > 0.0 ? sd : 1.0);
    return z;
}

double annual(double t, double phase_days) {
    return std::sin(2.0 * std::numbers::pi * (t - phase_days) / kYear);
}

// Noise weight solving
//   acov1(d + k u) = ar * var(d + k u)
// exactly for the generated paths (cross terms included).
double solve_noise_weight(std::span<const double> d, std::span<const double> u, double ar) {
    const std::size_t n = d.size();
    double md = 0.0, mu = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        md += d[t];
        mu += u[t];
    }
    md /= static_cast<double>(n);
    mu /= static_cast<double>(n);
    double cross_cov = 0.0, cross_lag = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        cross_cov += (d[t] - md) * (u[t] - mu);
        if (t + 1 < n) {
            cross_lag += (d[t] - md) * (u[t + 1] - mu) + (u[t] - mu) * (d[t + 1] - md);
        }
    }
    cross_cov /= static_cast<double>(n);
    cross_lag /= static_cast<double>(n);

    const double a = lag1_autocov(u) - ar * variance(u);
    const double b = cross_lag - 2.0 * ar * cross_cov;
    const double c = lag1_autocov(d) - ar * variance(d);
    if (std::abs(a) < 1e-14) {
        return (std::abs(b) > 1e-14 && -c / b > 0.0) ? -c / b : 1.0;
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return 1.0;
    const double r1 = (-b + std::sqrt(disc)) / (2.0 * a);
    const double r2 = (-b - std::sqrt(disc)) / (2.0 * a);
    if (r1 > 0.0 && r2 > 0.0) return std::min(r1, r2);
    if (r1 > 0.0) return r1;
    if (r2 > 0.0) return r2;
    return 1.0;
}

}  // namespace

TimeSeriesTable synth_table(const SynthConfig& config) {
    if (config.rows < 10) throw Error("synth_table: rows must be >= 10");
    if (!(config.ar > -1.0 && config.ar < 1.0)) throw Error("synth_table: ar must be in (-1,1)");
    const auto n = static_cast<std::size_t>(config.rows);
    const Rng root(config.seed);

    TimeSeriesTable table;
    table.names = default_schema();
    table.cols.assign(table.names.size(), std::vector<double>(n));
    table.dates.resize(n);
    const long start_serial = config.start.serial();
    for (std::size_t t = 0; t < n; ++t) {
        table.dates[t] = Date::from_serial(start_serial + static_cast<long>(t));
    }

    // Latent drivers: weekday traffic and a slow particulate factor.
    static constexpr double traffic_week[7] = {0.30, 0.35, 0.35, 0.35, 0.40, -0.80, -0.95};
    const std::vector<double> traffic_ar = ar1_path(n, 0.5, root.derive(1));
    const std::vector<double> dust = ar1_path(n, 0.6, root.derive(2));
    std::vector<double> traffic(n);
    for (std::size_t t = 0; t < n; ++t) {
        traffic[t] = traffic_ar[t] + 0.7 * traffic_week[table.dates[t].day_of_week()];
    }

    Rng noise = root.derive(3);
    auto fill = [&](const char* name, auto&& value) {
        auto& col = table.col(name);
        for (std::size_t t = 0; t < n; ++t) col[t] = value(static_cast<double>(t), t);
    };
    fill("TMP", [&](double t, std::size_t) {
        return 16.7 + 2.4 * annual(t, 78.0) + 1.0 * noise.normal();
    });
    fill("RH", [&](double t, std::size_t) {
        return std::clamp(55.0 + 9.0 * annual(t, 170.0) + 8.0 * noise.normal(), 5.0, 100.0);
    });
    fill("NO", [&](double, std::size_t t) {
        return std::max(0.5, 14.7 + 6.0 * traffic[t] + 4.0 * noise.normal());
    });
    fill("NO2", [&](double, std::size_t t) {
        return std::max(1.0, 23.0 + 4.5 * traffic[t] + 3.5 * noise.normal());
    });
    fill("NOX", [&](double, std::size_t t) {
        return table.col("NO")[t] + table.col("NO2")[t] + std::abs(0.8 * noise.normal());
    });
    fill("CO", [&](double, std::size_t t) {
        return std::max(0.03, 0.48 + 0.13 * traffic[t] + 0.09 * noise.normal());
    });
    fill("PM10", [&](double, std::size_t t) {
        return std::max(2.0, 41.9 + 10.0 * dust[t] + 8.0 * noise.normal());
    });
    fill("PM2.5", [&](double, std::size_t t) {
        return std::max(1.0, 21.3 + 6.0 * dust[t] + 3.5 * noise.normal());
    });
    fill("SO2", [&](double, std::size_t t) {
        return 0.6 + 3.0 * std::exp(0.55 * (0.6 * traffic[t] + 0.8 * noise.normal()) - 0.15);
    });
    fill("WDR", [&](double t, std::size_t) {
        return std::clamp(181.0 + 10.0 * annual(t, 200.0) + 15.0 * noise.normal(), 5.0, 355.0);
    });
    fill("WSP", [&](double t, std::size_t) {
        return std::max(0.2, 2.1 + 0.15 * annual(t, 130.0) + 0.35 * noise.normal());
    });

    // Deterministic target component on standardized drivers.
    static constexpr double o3_week[7] = {1.0, 0.6, 0.2, -0.2, -0.6, -0.5, -0.5};
    const std::vector<double> z_tmp = standardized(table.col("TMP"));
    const std::vector<double> z_rh = standardized(table.col("RH"));
    const std::vector<double> z_pm = standardized(table.col("PM2.5"));
    const std::vector<double> z_no = standardized(table.col("NO"));
    std::vector<double> det(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double td = static_cast<double>(t);
        det[t] = config.season_amp * annual(td, 29.0) +
                 config.weekday_amp * o3_week[table.dates[t].day_of_week()] +
                 config.interaction_amp * z_tmp[t] * z_rh[t] +
                 config.linear_amp * 0.7 * (z_pm[t] + z_no[t]);
    }

    // Pick the noise AR coefficient on the opposite side of the requested
    // autocorrelation from the deterministic part, then solve the exact
    // mixing weight.
    const double r_det = lag1_autocov(det) / variance(det);
    double rho_u;
    if (config.ar < r_det) {
        rho_u = std::clamp(2.0 * config.ar - r_det, -0.3, 0.95);
    } else {
        rho_u = std::min(0.98, 0.5 * (1.0 + config.ar));
    }
    const std::vector<double> u = ar1_path(n, rho_u, root.derive(4));
    const double kappa = solve_noise_weight(det, u, config.ar);

    std::vector<double> target(n);
    for (std::size_t t = 0; t < n; ++t) target[t] = det[t] + kappa * u[t];
    double mean = 0.0;
    for (double v : target) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : target) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    auto& o3 = table.col("O3");
    for (std::size_t t = 0; t < n; ++t) {
        o3[t] = std::max(0.5, config.target_mean +
                                  config.target_sd * (target[t] - mean) / (sd > 0.0 ? sd : 1.0));
    }
    return table;
}

}  // namespace ozonecast
