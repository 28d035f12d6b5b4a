// Command-line front end: data diagnostics, feature export, model
// benchmarks and synthetic fixture generation.
#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "ozonecast/benchmark.hpp"
#include "ozonecast/config.hpp"
#include "ozonecast/errors.hpp"
#include "ozonecast/features.hpp"
#include "ozonecast/parallel.hpp"
#include "ozonecast/stats.hpp"
#include "ozonecast/synth.hpp"
#include "ozonecast/table.hpp"

namespace fs = std::filesystem;
using namespace ozonecast;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitModelFailure = 1;
constexpr int kExitBadInput = 2;

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

std::string format_cell(double v, const char* fmt = "%.6f") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

TimeSeriesTable load_table(const RunConfig& cfg) {
    if (cfg.data.empty()) throw Error("no input file; pass --data");
    TimeSeriesTable table = parse_csv(cfg.data);
    const int max_run = cfg.overrides.get_int("fill.max_run", 12);
    const double max_fraction = cfg.overrides.get_double("fill.max_fraction", 0.005);
    return fill_gaps(table, max_run, max_fraction);
}

ApproachSpec approach_from_config(const RunConfig& cfg) {
    ApproachSpec spec;
    spec.id = cfg.approach;
    spec.top_k = cfg.overrides.get_int("approach.top_k", 4);
    spec.temporal_with_selection = cfg.overrides.get_int("approach.no_temporal", 0) == 0;
    spec.rank_forest.n_trees = cfg.overrides.get_int("rank.n_trees", 200);
    spec.rank_forest.min_samples_leaf = cfg.overrides.get_int("rank.min_leaf", 2);
    return spec;
}

int cmd_stats(const RunConfig& cfg) {
    const TimeSeriesTable table = load_table(cfg);
    fs::create_directories(cfg.out);

    std::string summary = "variable,min,mean,max,sd,skewness,kurtosis,shapiro_w,shapiro_p\n";
    for (const auto& name : table.names) {
        const auto& col = table.col(name);
        SummaryRow row = summary_stats(col);
        const ShapiroResult sw = shapiro_wilk(col);
        row.shapiro_w = sw.w;
        row.shapiro_p = sw.p;
        summary += name;
        summary += ',' + format_cell(row.min) + ',' + format_cell(row.mean) + ',' +
                   format_cell(row.max) + ',' + format_cell(row.sd) + ',' +
                   format_cell(row.skewness) + ',' + format_cell(row.kurtosis) + ',' +
                   format_cell(row.shapiro_w, "%.3f") + ',' + format_cell(row.shapiro_p, "%.3f") +
                   '\n';
    }
    write_text(fs::path(cfg.out) / "summary.csv", summary);

    const CorrelationMatrix corr = correlation_matrix(table, table.names);
    std::string matrix = "variable";
    for (const auto& name : corr.labels) matrix += ',' + name;
    matrix += '\n';
    for (std::size_t i = 0; i < corr.labels.size(); ++i) {
        matrix += corr.labels[i];
        for (std::size_t j = 0; j < corr.labels.size(); ++j) {
            matrix += ',' + format_cell(corr.values(static_cast<Eigen::Index>(i),
                                                    static_cast<Eigen::Index>(j)));
        }
        matrix += '\n';
    }
    write_text(fs::path(cfg.out) / "spearman.csv", matrix);
    std::cout << "wrote " << (fs::path(cfg.out) / "summary.csv").string() << " and "
              << (fs::path(cfg.out) / "spearman.csv").string() << "\n";
    return kExitOk;
}

void write_feature_csv(const fs::path& path, const FeatureSet& fs_set) {
    std::string text = "date";
    for (const auto& name : fs_set.names) text += ',' + name;
    text += ",O3_target\n";
    char buf[64];
    for (Eigen::Index i = 0; i < fs_set.X.rows(); ++i) {
        text += fs_set.dates[static_cast<std::size_t>(i)].to_string();
        for (Eigen::Index j = 0; j < fs_set.X.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), ",%.17g", fs_set.X(i, j));
            text += buf;
        }
        std::snprintf(buf, sizeof(buf), ",%.17g", fs_set.y[i]);
        text += buf;
        text += '\n';
    }
    write_text(path, text);
}

int cmd_featurize(const RunConfig& cfg) {
    const TimeSeriesTable table = load_table(cfg);
    const ApproachBuild build =
        build_approach(table, approach_from_config(cfg), cfg.split, cfg.seed);
    fs::create_directories(cfg.out);
    const std::string stem = "approach" + std::to_string(cfg.approach);
    write_feature_csv(fs::path(cfg.out) / (stem + "_train.csv"), build.train);
    write_feature_csv(fs::path(cfg.out) / (stem + "_test.csv"), build.test);
    std::cout << "wrote " << stem << "_train.csv (" << build.train.X.rows() << " rows) and "
              << stem << "_test.csv (" << build.test.X.rows() << " rows) with "
              << build.train.X.cols() << " features in " << cfg.out << "\n";
    return kExitOk;
}

int cmd_benchmark(const RunConfig& cfg) {
    const TimeSeriesTable table = load_table(cfg);
    const BenchmarkResult result =
        run_benchmark(table, approach_from_config(cfg), cfg.models, cfg.split, cfg.seed,
                      cfg.overrides, cfg.fingerprint());
    fs::create_directories(cfg.out);
    const std::string stem = "report_approach" + std::to_string(cfg.approach);
    write_text(fs::path(cfg.out) / (stem + ".csv"), report_csv(result.report));
    write_text(fs::path(cfg.out) / (stem + ".md"), report_markdown(result.report));

    for (const auto& row : result.report.rows) {
        if (!row.ok) continue;
        const ScatterData scatter =
            export_scatter(result.actual, result.predictions.at(row.id), row.display);
        const std::string name =
            "scatter_approach" + std::to_string(cfg.approach) + "_" + row.id + ".svg";
        write_text(fs::path(cfg.out) / name, scatter_svg(scatter));
    }

    std::cout << report_markdown(result.report);
    for (const auto& row : result.report.rows) {
        if (!row.ok) std::cerr << "model " << row.id << " failed: " << row.error << "\n";
    }
    return result.report.all_ok() ? kExitOk : kExitModelFailure;
}

int cmd_synth(const RunConfig& cfg) {
    SynthConfig synth;
    synth.rows = cfg.overrides.get_int("synth.rows", 1200);
    synth.seed = cfg.seed;
    synth.ar = cfg.overrides.get_double("synth.ar", 0.7);
    synth.season_amp = cfg.overrides.get_double("synth.season_amp", synth.season_amp);
    synth.weekday_amp = cfg.overrides.get_double("synth.weekday_amp", synth.weekday_amp);
    synth.interaction_amp =
        cfg.overrides.get_double("synth.interaction_amp", synth.interaction_amp);
    synth.linear_amp = cfg.overrides.get_double("synth.linear_amp", synth.linear_amp);
    const TimeSeriesTable table = synth_table(synth);

    fs::path out = cfg.out;
    if (out.empty() || fs::is_directory(out)) out /= "synth.csv";
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    write_csv(table, out);
    std::cout << "wrote " << out.string() << " (" << table.n_rows() << " rows)\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"daily ozone forecasting toolkit"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    std::vector<std::string> set_flags;
    std::string models_flag;
    std::string split_flag = "chrono";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key=value config file");
        sub->add_option("--data", cfg.data, "input CSV path");
        sub->add_option("--out", cfg.out, "output directory (file path for synth)");
        sub->add_option("--approach", cfg.approach, "feature regime 1..4")
            ->check(CLI::Range(1, 4));
        sub->add_option("--split", split_flag, "chrono or random");
        sub->add_option("--train-frac", cfg.split.train_fraction, "training fraction in (0,1)");
        sub->add_option("--seed", cfg.seed, "master seed");
        sub->add_option("--models", models_flag, "comma-separated roster subset");
        sub->add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
        sub->add_option("--set", set_flags, "model.param=value overrides")
            ->take_all();
    };

    CLI::App* stats_cmd = app.add_subcommand("stats", "summary statistics and rank correlations");
    CLI::App* featurize_cmd =
        app.add_subcommand("featurize", "write train/test feature matrices for one approach");
    CLI::App* benchmark_cmd =
        app.add_subcommand("benchmark", "run the model roster and write reports and scatters");
    CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic fixture CSV");
    for (CLI::App* sub : {stats_cmd, featurize_cmd, benchmark_cmd, synth_cmd}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        CLI::App* active = app.get_subcommands().at(0);
        if (!config_path.empty()) {
            RunConfig from_file = RunConfig::load(config_path);
            // Command-line flags override file values.
            if (active->count("--data") == 0) cfg.data = from_file.data;
            if (active->count("--out") == 0) cfg.out = from_file.out;
            if (active->count("--approach") == 0) cfg.approach = from_file.approach;
            if (active->count("--split") == 0) {
                cfg.split.mode = from_file.split.mode;
                split_flag = from_file.split.mode == SplitSpec::Mode::kChronological ? "chrono"
                                                                                     : "random";
            }
            if (active->count("--train-frac") == 0) {
                cfg.split.train_fraction = from_file.split.train_fraction;
            }
            if (active->count("--seed") == 0) cfg.seed = from_file.seed;
            if (active->count("--models") == 0) cfg.models = from_file.models;
            if (active->count("--threads") == 0) cfg.threads = from_file.threads;
            for (const auto& [k, v] : from_file.overrides.items()) {
                if (!cfg.overrides.has(k)) cfg.overrides.set(k, v);
            }
        }
        if (split_flag == "chrono") {
            cfg.split.mode = SplitSpec::Mode::kChronological;
        } else if (split_flag == "random") {
            cfg.split.mode = SplitSpec::Mode::kSeededRandom;
            cfg.split.seed = cfg.seed;
        } else {
            throw Error("--split must be chrono or random");
        }
        if (!models_flag.empty()) {
            cfg.models.clear();
            std::istringstream ms(models_flag);
            std::string m;
            while (std::getline(ms, m, ',')) {
                if (!m.empty()) cfg.models.push_back(m);
            }
        }
        for (const auto& kv : set_flags) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw Error("--set expects key=value, got " + kv);
            cfg.overrides.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (cfg.threads > 0) set_thread_count(cfg.threads);

        if (app.got_subcommand(stats_cmd)) return cmd_stats(cfg);
        if (app.got_subcommand(featurize_cmd)) return cmd_featurize(cfg);
        if (app.got_subcommand(benchmark_cmd)) return cmd_benchmark(cfg);
        if (app.got_subcommand(synth_cmd)) return cmd_synth(cfg);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitBadInput;
    }
    return kExitOk;
}
