#include "ozonecast/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ozonecast/errors.hpp"
#include "ozonecast/parallel.hpp"

namespace ozonecast {

namespace {

void check_fit_inputs(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (X.rows() == 0 || X.cols() == 0) throw FitError("empty design matrix");
    if (X.rows() != y.size()) throw FitError("row count mismatch");
}

Eigen::VectorXd normalized_importances(const std::vector<RegressionTree>& trees, Eigen::Index p) {
    Eigen::VectorXd imp = Eigen::VectorXd::Zero(p);
    for (const auto& tree : trees) tree.accumulate_importances(imp);
    const double total = imp.sum();
    if (total > 0.0) imp /= total;
    return imp;
}

}  // namespace

Eigen::VectorXd ForestModel::predict(const Eigen::MatrixXd& X) const {
    if (!trees.empty() && X.cols() != importances.size()) {
        throw PredictError("forest: feature count mismatch");
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(X.rows());
    parallel_for(static_cast<std::size_t>(X.rows()), [&](std::size_t i) {
        const auto row = X.row(static_cast<Eigen::Index>(i));
        double sum = 0.0;
        for (const auto& tree : trees) sum += tree.predict_row(row);
        out[static_cast<Eigen::Index>(i)] = sum / static_cast<double>(trees.size());
    });
    return out;
}

ForestModel fit_random_forest(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              const ForestConfig& config, std::uint64_t seed) {
    check_fit_inputs(X, y);
    if (config.n_trees < 1) throw FitError("fit_random_forest: n_trees must be >= 1");

    const Eigen::Index p = X.cols();
    const int mtry =
        config.mtry > 0
            ? std::min(config.mtry, static_cast<int>(p))
            : static_cast<int>(std::ceil(static_cast<double>(p) / 3.0));
    const TreeConfig tree_cfg{config.max_depth, config.min_samples_leaf};
    const auto n = static_cast<std::size_t>(X.rows());

    ForestModel model;
    model.config = config;
    model.mtry_used = mtry;
    model.seed = seed;
    model.trees.resize(static_cast<std::size_t>(config.n_trees));

    const Rng master(seed);
    parallel_for(model.trees.size(), [&](std::size_t t) {
        Rng rng = master.derive(t + 1);
        std::vector<int> rows(n);
        if (config.bootstrap) {
            for (std::size_t i = 0; i < n; ++i) {
                rows[i] = static_cast<int>(rng.uniform_int(n));
            }
        } else {
            std::iota(rows.begin(), rows.end(), 0);
        }
        model.trees[t] = grow_tree(X, y, rows, tree_cfg, mtry < p ? mtry : 0,
                                   mtry < p ? &rng : nullptr);
    });
    model.importances = normalized_importances(model.trees, p);
    return model;
}

ForestModel fit_bagging(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int n_estimators,
                        const TreeConfig& base, std::uint64_t seed) {
    ForestConfig cfg;
    cfg.n_trees = n_estimators;
    cfg.mtry = static_cast<int>(X.cols());
    cfg.max_depth = base.max_depth;
    cfg.min_samples_leaf = base.min_samples_leaf;
    cfg.bootstrap = true;
    return fit_random_forest(X, y, cfg, seed);
}

Eigen::VectorXd BoostedModel::predict(const Eigen::MatrixXd& X) const {
    Eigen::VectorXd out = Eigen::VectorXd::Constant(X.rows(), base_score);
    parallel_for(static_cast<std::size_t>(X.rows()), [&](std::size_t i) {
        const auto row = X.row(static_cast<Eigen::Index>(i));
        double sum = 0.0;
        for (const auto& tree : trees) sum += tree.predict_row(row);
        out[static_cast<Eigen::Index>(i)] += learning_rate * sum;
    });
    return out;
}

BinnedFeatures bin_features(const Eigen::MatrixXd& X, int n_bins) {
    if (n_bins < 2) throw FitError("bin_features: n_bins must be >= 2");
    const auto n = static_cast<std::size_t>(X.rows());
    const auto p = static_cast<std::size_t>(X.cols());
    BinnedFeatures out;
    out.edges.resize(p);
    out.codes.resize(p);

    parallel_for(p, [&](std::size_t f) {
        std::vector<double> sorted(n);
        for (std::size_t i = 0; i < n; ++i) {
            sorted[i] = X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f));
        }
        std::sort(sorted.begin(), sorted.end());
        std::vector<double> unique(sorted);
        unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

        std::vector<double>& edges = out.edges[f];
        if (unique.size() <= static_cast<std::size_t>(n_bins)) {
            // One bin per distinct value; histogram splits become exact.
            for (std::size_t k = 0; k + 1 < unique.size(); ++k) {
                edges.push_back(0.5 * (unique[k] + unique[k + 1]));
            }
        } else {
            for (int k = 1; k < n_bins; ++k) {
                const std::size_t pos = static_cast<std::size_t>(
                    static_cast<double>(k) * static_cast<double>(n) / n_bins);
                if (pos == 0 || pos >= n) continue;
                if (sorted[pos - 1] < sorted[pos]) {
                    const double edge = 0.5 * (sorted[pos - 1] + sorted[pos]);
                    if (edges.empty() || edge > edges.back()) edges.push_back(edge);
                }
            }
        }

        std::vector<std::uint16_t>& codes = out.codes[f];
        codes.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f));
            const auto it = std::lower_bound(edges.begin(), edges.end(), v);
            codes[i] = static_cast<std::uint16_t>(it - edges.begin());
        }
    });
    return out;
}

namespace {

struct HistCell {
    double g = 0.0;
    double h = 0.0;
    int count = 0;
};

struct LeafState {
    int node = -1;
    std::size_t begin = 0, end = 0;  // range in the shared row buffer
    double sum_g = 0.0, sum_h = 0.0;
    SplitResult split;
    bool has_split = false;
};

// Best histogram split of one leaf; features are scanned in ascending
// order and ties keep the earliest (feature, threshold).
void find_hist_split(const BinnedFeatures& bins, const Eigen::VectorXd& g,
                     const Eigen::VectorXd& h, std::span<const int> rows, int min_samples_leaf,
                     double lambda, LeafState& leaf) {
    leaf.has_split = false;
    if (rows.size() < 2 * static_cast<std::size_t>(min_samples_leaf)) return;
    const std::size_t p = bins.codes.size();
    const double parent = leaf.sum_g * leaf.sum_g / (leaf.sum_h + lambda);
    const double min_gain = 1e-12 * std::max(1.0, parent);

    std::vector<SplitResult> best(p);
    std::vector<bool> found(p, false);
    auto scan = [&](std::size_t f) {
        const std::vector<double>& edges = bins.edges[f];
        if (edges.empty()) return;
        const std::vector<std::uint16_t>& codes = bins.codes[f];
        std::vector<HistCell> hist(edges.size() + 1);
        for (int r : rows) {
            HistCell& cell = hist[codes[static_cast<std::size_t>(r)]];
            cell.g += g[r];
            cell.h += h[r];
            ++cell.count;
        }
        double gl = 0.0, hl = 0.0;
        int cl = 0;
        SplitResult fbest;
        bool ffound = false;
        for (std::size_t b = 0; b + 1 < hist.size(); ++b) {
            gl += hist[b].g;
            hl += hist[b].h;
            cl += hist[b].count;
            if (cl < min_samples_leaf) continue;
            const int cr = static_cast<int>(rows.size()) - cl;
            if (cr < min_samples_leaf) break;
            const double gr = leaf.sum_g - gl;
            const double hr = leaf.sum_h - hl;
            const double gain =
                0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent);
            if (!ffound || gain > fbest.gain) {
                ffound = true;
                fbest.feature = static_cast<int>(f);
                fbest.threshold = edges[b];
                fbest.gain = gain;
            }
        }
        best[f] = fbest;
        found[f] = ffound;
    };
    if (rows.size() * p >= 32768) {
        parallel_for(p, scan);
    } else {
        for (std::size_t f = 0; f < p; ++f) scan(f);
    }

    for (std::size_t f = 0; f < p; ++f) {
        if (!found[f] || best[f].gain <= min_gain) continue;
        if (!leaf.has_split || best[f].gain > leaf.split.gain) {
            leaf.has_split = true;
            leaf.split = best[f];
        }
    }
}

}  // namespace

RegressionTree grow_histogram_tree(const BinnedFeatures& bins, const Eigen::VectorXd& g,
                                   const Eigen::VectorXd& h, std::span<const int> rows,
                                   int max_leaves, int min_samples_leaf, double lambda) {
    if (rows.empty()) throw FitError("grow_histogram_tree: no rows");
    RegressionTree tree;
    std::vector<int> order(rows.begin(), rows.end());

    auto make_leaf = [&](int node, std::size_t begin, std::size_t end) {
        LeafState leaf;
        leaf.node = node;
        leaf.begin = begin;
        leaf.end = end;
        for (std::size_t i = begin; i < end; ++i) {
            leaf.sum_g += g[order[i]];
            leaf.sum_h += h[order[i]];
        }
        TreeNode& nd = tree.nodes[static_cast<std::size_t>(node)];
        nd.value = -leaf.sum_g / (leaf.sum_h + lambda);
        nd.n_samples = static_cast<int>(end - begin);
        find_hist_split(bins, g, h, std::span<const int>(order.data() + begin, end - begin),
                        min_samples_leaf, lambda, leaf);
        return leaf;
    };

    tree.nodes.emplace_back();
    std::vector<LeafState> open;
    open.push_back(make_leaf(0, 0, order.size()));
    int n_leaves = 1;
    std::vector<int> scratch;

    while (n_leaves < max_leaves) {
        // Best-first: highest candidate gain, ties to the lower node id.
        int pick = -1;
        for (std::size_t i = 0; i < open.size(); ++i) {
            if (!open[i].has_split) continue;
            if (pick < 0 || open[i].split.gain > open[static_cast<std::size_t>(pick)].split.gain) {
                pick = static_cast<int>(i);
            }
        }
        if (pick < 0) break;
        LeafState leaf = open[static_cast<std::size_t>(pick)];
        open.erase(open.begin() + pick);

        const std::vector<std::uint16_t>& codes =
            bins.codes[static_cast<std::size_t>(leaf.split.feature)];
        const std::vector<double>& edges =
            bins.edges[static_cast<std::size_t>(leaf.split.feature)];
        const auto edge_idx = static_cast<std::uint16_t>(
            std::lower_bound(edges.begin(), edges.end(), leaf.split.threshold) - edges.begin());

        scratch.clear();
        std::size_t mid = leaf.begin;
        for (std::size_t i = leaf.begin; i < leaf.end; ++i) {
            if (codes[static_cast<std::size_t>(order[i])] <= edge_idx) {
                order[mid++] = order[i];
            } else {
                scratch.push_back(order[i]);
            }
        }
        std::copy(scratch.begin(), scratch.end(), order.begin() + static_cast<long>(mid));

        const int left = static_cast<int>(tree.nodes.size());
        const int right = left + 1;
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        TreeNode& parent = tree.nodes[static_cast<std::size_t>(leaf.node)];
        parent.feature = leaf.split.feature;
        parent.threshold = leaf.split.threshold;
        parent.gain = leaf.split.gain;
        parent.left = left;
        parent.right = right;

        open.push_back(make_leaf(left, leaf.begin, mid));
        open.push_back(make_leaf(right, mid, leaf.end));
        ++n_leaves;
    }
    return tree;
}

BoostedModel fit_boosted(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const BoostConfig& config, std::uint64_t seed) {
    (void)seed;  // all variants are deterministic, no subsampling
    check_fit_inputs(X, y);
    if (config.n_rounds < 1) throw FitError("fit_boosted: n_rounds must be >= 1");
    if (!(config.learning_rate > 0.0 && config.learning_rate <= 1.0)) {
        throw FitError("fit_boosted: learning_rate must be in (0,1]");
    }

    const auto n = static_cast<std::size_t>(X.rows());
    std::vector<int> rows(n);
    std::iota(rows.begin(), rows.end(), 0);

    BoostedModel model;
    model.config = config;
    model.base_score = y.mean();
    model.learning_rate = config.learning_rate;
    model.trees.reserve(static_cast<std::size_t>(config.n_rounds));

    Eigen::VectorXd pred = Eigen::VectorXd::Constant(y.size(), model.base_score);
    const TreeConfig tree_cfg{config.max_depth, config.min_samples_leaf};
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(y.size());

    BinnedFeatures bins;
    if (config.variant == BoostConfig::Variant::kHistogram) {
        bins = bin_features(X, config.n_bins);
    }

    for (int round = 0; round < config.n_rounds; ++round) {
        RegressionTree tree;
        switch (config.variant) {
            case BoostConfig::Variant::kClassic: {
                const Eigen::VectorXd residual = y - pred;
                tree = grow_tree(X, residual, rows, tree_cfg);
                break;
            }
            case BoostConfig::Variant::kSecondOrder: {
                const Eigen::VectorXd grad = pred - y;
                tree = grow_tree_gh(X, grad, ones, rows, tree_cfg, config.lambda_reg);
                break;
            }
            case BoostConfig::Variant::kHistogram: {
                const Eigen::VectorXd grad = pred - y;
                tree = grow_histogram_tree(bins, grad, ones, rows, config.max_leaves,
                                           config.min_samples_leaf, config.lambda_reg);
                break;
            }
        }
        pred += config.learning_rate * tree.predict(X);
        model.trees.push_back(std::move(tree));
    }
    return model;
}

}  // namespace ozonecast
