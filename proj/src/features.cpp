#include "ozonecast/features.hpp"

#include <algorithm>
#include <numeric>

#include "ozonecast/errors.hpp"
#include "ozonecast/rng.hpp"

namespace ozonecast {

std::vector<std::string> predictor_names() {
    std::vector<std::string> out;
    for (const auto& name : default_schema()) {
        if (name != kTargetColumn) out.push_back(name);
    }
    return out;
}

const std::vector<std::string>& temporal_feature_names() {
    static const std::vector<std::string> names = {"year", "month", "day", "day_of_week"};
    return names;
}

Eigen::MatrixXd temporal_features(const std::vector<Date>& dates) {
    Eigen::MatrixXd T(static_cast<Eigen::Index>(dates.size()), 4);
    for (std::size_t i = 0; i < dates.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        T(r, 0) = dates[i].year;
        T(r, 1) = dates[i].month;
        T(r, 2) = dates[i].day;
        T(r, 3) = dates[i].day_of_week();
    }
    return T;
}

void interaction_features(Eigen::MatrixXd& X, std::vector<std::string>& names,
                          int n_base_columns) {
    if (n_base_columns < 2) throw FeatureError("interaction_features requires >= 2 base columns");
    const int pairs = n_base_columns * (n_base_columns - 1) / 2;
    const Eigen::Index old_cols = X.cols();
    X.conservativeResize(Eigen::NoChange, old_cols + pairs);
    Eigen::Index next = old_cols;
    for (int i = 0; i < n_base_columns; ++i) {
        for (int j = i + 1; j < n_base_columns; ++j) {
            X.col(next) = X.col(i).cwiseProduct(X.col(j));
            names.push_back(names[static_cast<std::size_t>(i)] + "*" +
                            names[static_cast<std::size_t>(j)]);
            ++next;
        }
    }
}

LagResult lag_features(const Eigen::VectorXd& y, const std::vector<int>& lags) {
    if (lags.empty()) throw FeatureError("lag_features requires a nonempty lag set");
    std::vector<int> sorted = lags;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (int lag : sorted) {
        if (lag < 1) throw FeatureError("lag must be >= 1");
        if (lag >= y.size()) throw FeatureError("lag must be < n");
    }
    LagResult out;
    out.dropped = sorted.back();
    const Eigen::Index rows = y.size() - out.dropped;
    out.columns.resize(rows, static_cast<Eigen::Index>(sorted.size()));
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        const int lag = sorted[k];
        out.names.push_back("O3_lag_" + std::to_string(lag));
        for (Eigen::Index t = 0; t < rows; ++t) {
            out.columns(t, static_cast<Eigen::Index>(k)) = y[t + out.dropped - lag];
        }
    }
    return out;
}

std::vector<RankedFeature> rank_features(const Eigen::MatrixXd& X_train,
                                         const Eigen::VectorXd& y_train,
                                         const std::vector<std::string>& names,
                                         const ForestConfig& config, std::uint64_t seed) {
    const ForestModel forest = fit_random_forest(X_train, y_train, config, seed);
    std::vector<RankedFeature> ranked;
    ranked.reserve(names.size());
    for (std::size_t j = 0; j < names.size(); ++j) {
        ranked.push_back({names[j], forest.importances[static_cast<Eigen::Index>(j)]});
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const RankedFeature& a, const RankedFeature& b) {
        return a.importance > b.importance;
    });
    return ranked;
}

namespace {

Eigen::MatrixXd table_matrix(const TimeSeriesTable& table, const std::vector<std::string>& cols) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(table.n_rows()),
                      static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const auto& c = table.col(cols[j]);
        for (std::size_t i = 0; i < table.n_rows(); ++i) {
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c[i];
        }
    }
    return X;
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& X, const std::vector<int>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
    }
    return out;
}

Eigen::VectorXd select_rows(const Eigen::VectorXd& v, const std::vector<int>& rows) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[rows[i]];
    return out;
}

}  // namespace

ApproachBuild build_approach(const TimeSeriesTable& table, const ApproachSpec& spec,
                             const SplitSpec& split_spec, std::uint64_t seed) {
    if (spec.id < 1 || spec.id > 4) throw FeatureError("approach id must be 1..4");
    if (table.has_gaps()) throw FeatureError("build_approach requires a gap-free table");
    if (spec.id == 4 && spec.lags.empty()) throw FeatureError("approach 4 requires lags");

    const std::vector<std::string> predictors = predictor_names();
    const auto& target = table.col(std::string(kTargetColumn));
    Eigen::VectorXd y_full(static_cast<Eigen::Index>(target.size()));
    for (std::size_t i = 0; i < target.size(); ++i) {
        y_full[static_cast<Eigen::Index>(i)] = target[i];
    }

    // Approach 4 consumes the first max(lag) rows to form its lag columns.
    LagResult lag;
    int drop = 0;
    if (spec.id == 4) {
        lag = lag_features(y_full, spec.lags);
        drop = lag.dropped;
    }
    const auto n_eff = static_cast<std::size_t>(table.n_rows()) - static_cast<std::size_t>(drop);
    std::vector<Date> eff_dates(table.dates.begin() + drop, table.dates.end());
    const Eigen::VectorXd y_eff = y_full.tail(static_cast<Eigen::Index>(n_eff));

    const SplitIndices idx = make_split(n_eff, split_spec);

    // Raw predictors over the effective rows.
    Eigen::MatrixXd base = table_matrix(table, predictors)
                               .bottomRows(static_cast<Eigen::Index>(n_eff));

    ApproachBuild out;
    if (spec.id >= 3) {
        if (spec.selected) {
            for (const auto& name : *spec.selected) {
                if (std::find(predictors.begin(), predictors.end(), name) == predictors.end()) {
                    throw SchemaError("selected feature " + name + " is not a predictor");
                }
                out.ranking.push_back({name, 0.0});
            }
        } else {
            const Eigen::MatrixXd X_rank = select_rows(base, idx.train);
            const Eigen::VectorXd y_rank = select_rows(y_eff, idx.train);
            out.ranking = rank_features(X_rank, y_rank, predictors, spec.rank_forest,
                                        Rng(seed).derive(0x4A4E).seed());
        }
    }

    std::vector<std::string> names;
    Eigen::MatrixXd X;
    if (spec.id <= 2) {
        names = predictors;
        X = base;
        if (spec.id == 2) {
            const Eigen::MatrixXd T = temporal_features(eff_dates);
            const int n_base = static_cast<int>(predictors.size());
            X.conservativeResize(Eigen::NoChange, X.cols() + 4);
            X.rightCols(4) = T;
            for (const auto& t : temporal_feature_names()) names.push_back(t);
            // Products over the original predictors only.
            Eigen::MatrixXd with_products = X.leftCols(n_base);
            std::vector<std::string> product_names(names.begin(), names.begin() + n_base);
            interaction_features(with_products, product_names, n_base);
            const Eigen::Index n_pairs = with_products.cols() - n_base;
            X.conservativeResize(Eigen::NoChange, X.cols() + n_pairs);
            X.rightCols(n_pairs) = with_products.rightCols(n_pairs);
            names.insert(names.end(), product_names.begin() + n_base, product_names.end());
        }
    } else {
        const int k = std::min<int>(spec.top_k, static_cast<int>(out.ranking.size()));
        std::vector<std::string> chosen;
        for (int i = 0; i < k; ++i) chosen.push_back(out.ranking[static_cast<std::size_t>(i)].name);
        names = chosen;
        X.resize(static_cast<Eigen::Index>(n_eff), static_cast<Eigen::Index>(chosen.size()));
        for (std::size_t j = 0; j < chosen.size(); ++j) {
            const auto col = static_cast<Eigen::Index>(
                std::find(predictors.begin(), predictors.end(), chosen[j]) - predictors.begin());
            X.col(static_cast<Eigen::Index>(j)) = base.col(col);
        }
        const bool temporal = spec.id == 4 || spec.temporal_with_selection;
        if (temporal) {
            const Eigen::MatrixXd T = temporal_features(eff_dates);
            X.conservativeResize(Eigen::NoChange, X.cols() + 4);
            X.rightCols(4) = T;
            for (const auto& t : temporal_feature_names()) names.push_back(t);
        }
        if (spec.id == 4) {
            X.conservativeResize(Eigen::NoChange, X.cols() + lag.columns.cols());
            X.rightCols(lag.columns.cols()) = lag.columns;
            names.insert(names.end(), lag.names.begin(), lag.names.end());
        }
    }

    out.scaler = fit_scaler(X, names, idx.train);
    out.train.names = names;
    out.train.X = out.scaler.transform(select_rows(X, idx.train));
    out.train.y = select_rows(y_eff, idx.train);
    out.test.names = names;
    out.test.X = out.scaler.transform(select_rows(X, idx.test));
    out.test.y = select_rows(y_eff, idx.test);
    for (int i : idx.train) out.train.dates.push_back(eff_dates[static_cast<std::size_t>(i)]);
    for (int i : idx.test) out.test.dates.push_back(eff_dates[static_cast<std::size_t>(i)]);
    return out;
}

}  // namespace ozonecast
