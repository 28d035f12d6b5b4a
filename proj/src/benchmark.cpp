#include "ozonecast/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ozonecast/ensemble.hpp"
#include "ozonecast/errors.hpp"
#include "ozonecast/knn.hpp"
#include "ozonecast/linear.hpp"
#include "ozonecast/metrics.hpp"
#include "ozonecast/mlp.hpp"
#include "ozonecast/rng.hpp"
#include "ozonecast/stacking.hpp"
#include "ozonecast/svr.hpp"

namespace ozonecast {

const std::vector<RosterEntry>& full_roster() {
    static const std::vector<RosterEntry> roster = {
        {"ols", "Linear Regression"},
        {"rf", "Random Forest"},
        {"gb", "Gradient Boosting"},
        {"svr", "Support Vector Regression"},
        {"knn", "K-Nearest Neighbors"},
        {"enet", "ElasticNet"},
        {"gb2", "Second-Order Boosting"},
        {"gbh", "Histogram Boosting"},
        {"bagging", "Bagging"},
        {"stacking", "Stacking"},
        {"mlp_tanh", "MLP (150, tanh)"},
        {"mlp_relu", "MLP (100, relu)"},
    };
    return roster;
}

std::vector<std::string> resolve_models(const std::vector<std::string>& requested) {
    if (requested.empty()) {
        std::vector<std::string> all;
        for (const auto& e : full_roster()) all.push_back(e.id);
        return all;
    }
    std::vector<std::string> wanted;
    for (std::string id : requested) {
        if (id == "linear") id = "ols";
        bool known = false;
        for (const auto& e : full_roster()) known = known || e.id == id;
        if (!known) throw Error("unknown model id " + id);
        wanted.push_back(id);
    }
    std::vector<std::string> out;  // roster order, deduplicated
    for (const auto& e : full_roster()) {
        if (std::find(wanted.begin(), wanted.end(), e.id) != wanted.end()) out.push_back(e.id);
    }
    return out;
}

bool BenchmarkReport::all_ok() const {
    for (const auto& row : rows) {
        if (!row.ok) return false;
    }
    return true;
}

namespace {

int depth_or_unlimited(int v) { return v <= 0 ? std::numeric_limits<int>::max() : v; }

ForestConfig forest_config(const KeyValues& kv, const std::string& prefix, int n_trees_default,
                           int mtry_default) {
    ForestConfig cfg;
    cfg.n_trees = kv.get_int(prefix + ".n_trees", n_trees_default);
    cfg.mtry = kv.get_int(prefix + ".mtry", mtry_default);
    cfg.max_depth = depth_or_unlimited(kv.get_int(prefix + ".max_depth", 0));
    cfg.min_samples_leaf = kv.get_int(prefix + ".min_leaf", 2);
    return cfg;
}

BoostConfig boost_config(const KeyValues& kv, const std::string& prefix,
                         BoostConfig::Variant variant) {
    BoostConfig cfg;
    cfg.variant = variant;
    cfg.n_rounds = kv.get_int(prefix + ".rounds", 300);
    cfg.learning_rate = kv.get_double(prefix + ".learning_rate", 0.1);
    cfg.max_depth = kv.get_int(prefix + ".depth", 3);
    cfg.min_samples_leaf = kv.get_int(prefix + ".min_leaf", 1);
    cfg.lambda_reg = kv.get_double(prefix + ".lambda", 1.0);
    cfg.n_bins = kv.get_int(prefix + ".bins", 64);
    cfg.max_leaves = kv.get_int(prefix + ".leaves", 31);
    return cfg;
}

ModelFactory make_factory(const std::string& id, const KeyValues& kv) {
    if (id == "ols") {
        return [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::uint64_t) {
            return std::make_unique<LinearModel>(fit_ols(X, y));
        };
    }
    if (id == "rf") {
        const ForestConfig cfg = forest_config(kv, "forest", 200, 0);
        return [cfg](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::uint64_t seed) {
            return std::make_unique<ForestModel>(fit_random_forest(X, y, cfg, seed));
        };
    }
    if (id == "gb") {
        const BoostConfig cfg = boost_config(kv, "gb", BoostConfig::Variant::kClassic);
        return [cfg](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::uint64_t seed) {
            return std::make_unique<BoostedModel>(fit_boosted(X, y, cfg, seed));
        };
    }
    if (id == "gb2") {
        const BoostConfig cfg = boost_config(kv, "gb2", BoostConfig::Variant::kSecondOrder);
        return [cfg](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::uint64_t seed) {
            return std::make_unique<BoostedModel>(fit_boosted(X, y, cfg, seed));
        };
    }
    if (id == "gbh") {
        const BoostConfig cfg = boost_config(kv, "gbh", BoostConfig::Variant::kHistogram);
        return [cfg](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::uint64_t seed) {
            return std::make_unique<BoostedModel>(fit_boosted(X, y, cfg, seed));
        };
    }
    if (id == "bagging") {
        const int n_estimators = kv.get_int("bagging.n_estimators", 10);
        TreeConfig base;
        base.max_depth = depth_or_unlimited(kv.get_int("bagging.max_depth", 0));
        base.min_samples_leaf = kv.get_int("bagging.min_leaf", 2);
        return [n_estimators, base](const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    std::uint64_t seed) {
            return std::make_unique<ForestModel>(fit_bagging(X, y, n_estimators, base, seed));
        };
    }
    if (id == "svr") {
        SvrConfig cfg;
        cfg.c = kv.get_double("svr.c", 1.0);
        cfg.epsilon = kv.get_double("svr.epsilon", 0.1);
        cfg.gamma = kv.get_double("svr.gamma", -1.0);
        cfg.tol = kv.get_double("svr.tol", 1e-3);
        cfg.max_passes = kv.get_int("svr.max_passes", 50);
        return [cfg](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::uint64_t) {
            return std::make_unique<SvrModel>(fit_svr(X, y, cfg));
        };
    }
    if (id == "knn") {
        const int k = kv.get_int("knn.k", 5);
        return [k](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::uint64_t) {
            return std::make_unique<KnnModel>(fit_knn(X, y, k));
        };
    }
    if (id == "enet") {
        const double lambda = kv.get_double("enet.lambda", 1.0);
        const double l1_ratio = kv.get_double("enet.l1_ratio", 0.5);
        const double tol = kv.get_double("enet.tol", 1e-6);
        const int max_iter = kv.get_int("enet.max_iter", 10000);
        return [=](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::uint64_t) {
            return std::make_unique<LinearModel>(fit_elastic_net(X, y, lambda, l1_ratio, tol,
                                                                 max_iter));
        };
    }
    if (id == "mlp_tanh" || id == "mlp_relu") {
        MlpConfig cfg;
        cfg.hidden = id == "mlp_tanh" ? 150 : 100;
        cfg.activation =
            id == "mlp_tanh" ? MlpConfig::Activation::kTanh : MlpConfig::Activation::kRelu;
        cfg.epochs = kv.get_int("mlp.epochs", 200);
        cfg.batch_size = kv.get_int("mlp.batch", 32);
        cfg.learning_rate = kv.get_double("mlp.lr", 1e-3);
        return [cfg](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::uint64_t seed) {
            return std::make_unique<MlpModel>(fit_mlp(X, y, cfg, seed));
        };
    }
    if (id == "stacking") {
        const int k_folds = kv.get_int("stacking.k", 5);
        std::vector<BaseSpec> bases;
        for (const char* base_id : {"ols", "rf", "gb", "knn"}) {
            bases.push_back({base_id, make_factory(base_id, kv)});
        }
        return [k_folds, bases](const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                std::uint64_t seed) -> std::unique_ptr<Regressor> {
            StackingFit fit = fit_stacking(X, y, bases, k_folds, seed);
            return std::make_unique<StackingModel>(std::move(fit.model));
        };
    }
    throw Error("unknown model id " + id);
}

}  // namespace

BenchmarkResult run_benchmark(const TimeSeriesTable& table, const ApproachSpec& spec,
                              const std::vector<std::string>& model_ids,
                              const SplitSpec& split_spec, std::uint64_t seed,
                              const KeyValues& overrides, const std::string& fingerprint) {
    const std::vector<std::string> ids = resolve_models(model_ids);
    const ApproachBuild build = build_approach(table, spec, split_spec, seed);

    BenchmarkResult result;
    result.report.approach_id = spec.id;
    result.report.seed = seed;
    result.report.fingerprint = fingerprint;
    result.actual = build.test.y;

    const Rng master(seed);
    for (const auto& id : ids) {
        std::size_t roster_index = 0;
        for (std::size_t i = 0; i < full_roster().size(); ++i) {
            if (full_roster()[i].id == id) roster_index = i;
        }
        ReportRow row;
        row.id = id;
        row.display = full_roster()[roster_index].display;
        try {
            const ModelFactory factory = make_factory(id, overrides);
            const std::uint64_t model_seed = master.derive(100 + roster_index).seed();
            const auto model = factory(build.train.X, build.train.y, model_seed);
            const Eigen::VectorXd pred = model->predict(build.test.X);
            row.mse = mse(build.test.y, pred);
            row.r2 = r2(build.test.y, pred);
            row.ok = true;
            result.predictions[id] = pred;
        } catch (const std::exception& err) {
            row.ok = false;
            row.error = err.what();
        }
        result.report.rows.push_back(std::move(row));
    }
    return result;
}

namespace {
std::string format_metric(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}
}  // namespace

std::string report_csv(const BenchmarkReport& report) {
    std::ostringstream out;
    out << "model,mse,r2\n";
    for (const auto& row : report.rows) {
        if (row.ok) {
            out << row.display << ',' << format_metric(row.mse) << ',' << format_metric(row.r2)
                << '\n';
        } else {
            out << row.display << ",,\n";
        }
    }
    return out.str();
}

std::string report_markdown(const BenchmarkReport& report) {
    std::ostringstream out;
    out << "# Approach " << report.approach_id << " benchmark\n\n";
    out << "seed: " << report.seed;
    if (!report.fingerprint.empty()) out << ", config: " << report.fingerprint;
    out << "\n\n";
    out << "| Model | MSE | R² |\n";
    out << "|---|---|---|\n";
    for (const auto& row : report.rows) {
        if (row.ok) {
            out << "| " << row.display << " | " << format_metric(row.mse) << " | "
                << format_metric(row.r2) << " |\n";
        } else {
            out << "| " << row.display << " | error | " << row.error << " |\n";
        }
    }
    return out.str();
}

ScatterData export_scatter(const Eigen::VectorXd& actual, const Eigen::VectorXd& predicted,
                           const std::string& model) {
    if (actual.size() != predicted.size()) throw MetricError("export_scatter: length mismatch");
    if (actual.size() == 0) throw MetricError("export_scatter: empty input");
    ScatterData data;
    data.model = model;
    data.points.reserve(static_cast<std::size_t>(actual.size()));
    double lo = actual[0], hi = actual[0];
    for (Eigen::Index i = 0; i < actual.size(); ++i) {
        data.points.emplace_back(actual[i], predicted[i]);
        lo = std::min({lo, actual[i], predicted[i]});
        hi = std::max({hi, actual[i], predicted[i]});
    }
    data.identity_lo = lo;
    data.identity_hi = hi;
    return data;
}

std::string scatter_csv(const ScatterData& data) {
    std::ostringstream out;
    out << "actual,predicted\n";
    char buf[64];
    for (const auto& [a, p] : data.points) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g", a, p);
        out << buf << '\n';
    }
    return out.str();
}

ScatterData scatter_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "empty scatter csv");
    ScatterData data;
    Eigen::Index count = 0;
    std::vector<double> actual, predicted;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(line_no, "expected actual,predicted");
        actual.push_back(std::stod(line.substr(0, comma)));
        predicted.push_back(std::stod(line.substr(comma + 1)));
        ++count;
    }
    Eigen::VectorXd a(count), p(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        a[i] = actual[static_cast<std::size_t>(i)];
        p[i] = predicted[static_cast<std::size_t>(i)];
    }
    return export_scatter(a, p, "");
}

std::string scatter_svg(const ScatterData& data) {
    constexpr double size = 640.0;
    constexpr double margin_left = 72.0, margin_right = 24.0;
    constexpr double margin_top = 24.0, margin_bottom = 64.0;
    const double span = data.identity_hi - data.identity_lo;
    const double pad = span > 0.0 ? 0.05 * span : 1.0;
    const double lo = data.identity_lo - pad;
    const double hi = data.identity_hi + pad;
    const double plot_w = size - margin_left - margin_right;
    const double plot_h = size - margin_top - margin_bottom;
    auto sx = [&](double v) { return margin_left + (v - lo) / (hi - lo) * plot_w; };
    auto sy = [&](double v) { return size - margin_bottom - (v - lo) / (hi - lo) * plot_h; };

    char buf[256];
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" "
           "viewBox=\"0 0 640 640\">\n";
    svg << "<rect width=\"640\" height=\"640\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"none\" "
                  "stroke=\"#444\" stroke-width=\"1\"/>\n",
                  margin_left, margin_top, plot_w, plot_h);
    svg << buf;

    for (int t = 0; t <= 4; ++t) {
        const double v = lo + (hi - lo) * t / 4.0;
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#444\"/>\n",
                      sx(v), size - margin_bottom, sx(v), size - margin_bottom + 6.0);
        svg << buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" text-anchor=\"middle\">"
                      "%.4g</text>\n",
                      sx(v), size - margin_bottom + 20.0, v);
        svg << buf;
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#444\"/>\n",
                      margin_left - 6.0, sy(v), margin_left, sy(v));
        svg << buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" text-anchor=\"end\">"
                      "%.4g</text>\n",
                      margin_left - 10.0, sy(v) + 4.0, v);
        svg << buf;
    }

    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#d62728\" "
                  "stroke-width=\"2\"/>\n",
                  sx(data.identity_lo), sy(data.identity_lo), sx(data.identity_hi),
                  sy(data.identity_hi));
    svg << buf;

    for (const auto& [a, p] : data.points) {
        std::snprintf(buf, sizeof(buf),
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2\" fill=\"#1f77b4\" "
                      "fill-opacity=\"0.6\"/>\n",
                      sx(a), sy(p));
        svg << buf;
    }

    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.2f\" y=\"%.2f\" font-size=\"14\" text-anchor=\"middle\">"
                  "actual O3 (µg/m³)</text>\n",
                  margin_left + plot_w / 2.0, size - 16.0);
    svg << buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"18\" y=\"%.2f\" font-size=\"14\" text-anchor=\"middle\" "
                  "transform=\"rotate(-90 18 %.2f)\">predicted O3 (µg/m³)</text>\n",
                  margin_top + plot_h / 2.0, margin_top + plot_h / 2.0);
    svg << buf;
    if (!data.model.empty()) {
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.2f\" y=\"16\" font-size=\"14\" text-anchor=\"middle\">"
                      "%s</text>\n",
                      margin_left + plot_w / 2.0, data.model.c_str());
        svg << buf;
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace ozonecast
