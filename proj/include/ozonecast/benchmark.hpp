#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ozonecast/config.hpp"
#include "ozonecast/features.hpp"
#include "ozonecast/table.hpp"

namespace ozonecast {

struct RosterEntry {
    std::string id;       // stable key: "ols", "rf", ...
    std::string display;  // report row label
};

/// The twelve-model roster in fixed report order.
const std::vector<RosterEntry>& full_roster();

/// Resolves user-supplied model ids (accepting the "linear" alias) to the
/// canonical subset in roster order; unknown ids raise Error.
std::vector<std::string> resolve_models(const std::vector<std::string>& requested);

struct ReportRow {
    std::string id;
    std::string display;
    double mse = std::numeric_limits<double>::quiet_NaN();
    double r2 = std::numeric_limits<double>::quiet_NaN();
    bool ok = false;
    std::string error;  // set when ok is false
};

struct BenchmarkReport {
    int approach_id = 1;
    std::uint64_t seed = 0;
    std::string fingerprint;
    std::vector<ReportRow> rows;

    bool all_ok() const;
};

struct BenchmarkResult {
    BenchmarkReport report;
    std::map<std::string, Eigen::VectorXd> predictions;  // per model id
    Eigen::VectorXd actual;                              // test targets
};

/// Builds the approach features, trains every requested roster entry with
/// an independently derived seed, and evaluates MSE/R2 on the test rows.
/// A model failure becomes an error row; the run continues.
BenchmarkResult run_benchmark(const TimeSeriesTable& table, const ApproachSpec& spec,
                              const std::vector<std::string>& model_ids,
                              const SplitSpec& split_spec, std::uint64_t seed,
                              const KeyValues& overrides = {},
                              const std::string& fingerprint = "");

/// CSV serialization: header model,mse,r2; error rows leave the metric
/// fields empty. Markdown mirrors the published table layout.
std::string report_csv(const BenchmarkReport& report);
std::string report_markdown(const BenchmarkReport& report);

struct ScatterData {
    std::string model;
    std::vector<std::pair<double, double>> points;  // (actual, predicted)
    double identity_lo = 0.0;  // identity-line endpoints
    double identity_hi = 0.0;
};

ScatterData export_scatter(const Eigen::VectorXd& actual, const Eigen::VectorXd& predicted,
                           const std::string& model);

std::string scatter_csv(const ScatterData& data);
ScatterData scatter_from_csv(const std::string& text);

/// Self-contained SVG: 640x640 viewport, linear axes padded 5%, a 2px
/// identity line and labeled actual/predicted axes.
std::string scatter_svg(const ScatterData& data);

}  // namespace ozonecast
