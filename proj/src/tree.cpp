#include "ozonecast/tree.hpp"

#include <algorithm>
#include <numeric>

#include "ozonecast/errors.hpp"
#include "ozonecast/parallel.hpp"

namespace ozonecast {

double RegressionTree::predict_row(const Eigen::RowVectorXd& x) const {
    int node = 0;
    while (!nodes[static_cast<std::size_t>(node)].is_leaf()) {
        const TreeNode& nd = nodes[static_cast<std::size_t>(node)];
        node = x[nd.feature] <= nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(node)].value;
}

Eigen::VectorXd RegressionTree::predict(const Eigen::MatrixXd& X) const {
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = predict_row(X.row(i));
    return out;
}

void RegressionTree::accumulate_importances(Eigen::VectorXd& into) const {
    for (const TreeNode& nd : nodes) {
        if (!nd.is_leaf()) into[nd.feature] += nd.gain;
    }
}

namespace {

// One feature's best boundary, shared by both split flavors. `stat1` is
// the per-row numerator statistic (y or g), `stat2` the denominator
// (constant 1 weights or hessians).
struct FeatureScan {
    bool found = false;
    double threshold = 0.0;
    double gain = 0.0;
};

template <typename Score>
FeatureScan scan_feature(const Eigen::MatrixXd& X, int feature, std::span<const int> rows,
                         int min_samples_leaf, std::vector<std::pair<double, int>>& buf,
                         const Score& score) {
    const std::size_t n = rows.size();
    buf.resize(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = {X(rows[i], feature), rows[i]};
    std::sort(buf.begin(), buf.end());

    FeatureScan best;
    score.reset();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        score.push(buf[i].second);
        if (buf[i].first == buf[i + 1].first) continue;
        const auto n_left = static_cast<int>(i + 1);
        const auto n_right = static_cast<int>(n - i - 1);
        if (n_left < min_samples_leaf) continue;
        if (n_right < min_samples_leaf) break;
        const double gain = score.gain();
        if (!best.found || gain > best.gain) {
            best.found = true;
            best.gain = gain;
            best.threshold = 0.5 * (buf[i].first + buf[i + 1].first);
        }
    }
    return best;
}

// Variance-reduction score: parent SSE minus child SSEs, computed from
// target sums as SL^2/nL + SR^2/nR - S^2/n.
struct SseScore {
    const Eigen::VectorXd& y;
    double total_sum;
    std::size_t total_n;
    mutable double left_sum = 0.0;
    mutable std::size_t left_n = 0;

    void reset() const {
        left_sum = 0.0;
        left_n = 0;
    }
    void push(int row) const {
        left_sum += y[row];
        ++left_n;
    }
    double gain() const {
        const double right_sum = total_sum - left_sum;
        const auto nl = static_cast<double>(left_n);
        const auto nr = static_cast<double>(total_n - left_n);
        return left_sum * left_sum / nl + right_sum * right_sum / nr -
               total_sum * total_sum / static_cast<double>(total_n);
    }
};

// Second-order regularized score.
struct GhScore {
    const Eigen::VectorXd& g;
    const Eigen::VectorXd& h;
    double total_g;
    double total_h;
    double lambda;
    mutable double left_g = 0.0;
    mutable double left_h = 0.0;

    void reset() const {
        left_g = 0.0;
        left_h = 0.0;
    }
    void push(int row) const {
        left_g += g[row];
        left_h += h[row];
    }
    double gain() const {
        const double right_g = total_g - left_g;
        const double right_h = total_h - left_h;
        return 0.5 * (left_g * left_g / (left_h + lambda) + right_g * right_g / (right_h + lambda) -
                      total_g * total_g / (total_h + lambda));
    }
};

template <typename MakeScore>
std::optional<SplitResult> best_split_impl(const Eigen::MatrixXd& X, std::span<const int> rows,
                                           std::span<const int> features, int min_samples_leaf,
                                           double min_gain, const MakeScore& make_score) {
    if (rows.size() < 2 * static_cast<std::size_t>(min_samples_leaf)) return std::nullopt;

    std::vector<FeatureScan> scans(features.size());
    const std::size_t work = rows.size() * features.size();
    auto scan_one = [&](std::size_t fi) {
        std::vector<std::pair<double, int>> buf;
        scans[fi] = scan_feature(X, features[fi], rows, min_samples_leaf, buf, make_score());
    };
    if (work >= 32768) {
        parallel_for(features.size(), scan_one);
    } else {
        for (std::size_t fi = 0; fi < features.size(); ++fi) scan_one(fi);
    }

    SplitResult best;
    bool found = false;
    for (std::size_t fi = 0; fi < features.size(); ++fi) {
        const FeatureScan& s = scans[fi];
        if (!s.found || s.gain <= min_gain) continue;
        if (!found || s.gain > best.gain) {
            found = true;
            best.feature = features[fi];
            best.threshold = s.threshold;
            best.gain = s.gain;
        }
    }
    if (!found) return std::nullopt;
    return best;
}

std::vector<int> all_features(Eigen::Index p) {
    std::vector<int> f(static_cast<std::size_t>(p));
    std::iota(f.begin(), f.end(), 0);
    return f;
}

}  // namespace

std::optional<SplitResult> best_split(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                      std::span<const int> rows, std::span<const int> features,
                                      int min_samples_leaf) {
    double total = 0.0, total_sq = 0.0;
    for (int r : rows) {
        total += y[r];
        total_sq += y[r] * y[r];
    }
    const double parent_sse =
        total_sq - total * total / static_cast<double>(rows.size());
    const double min_gain = 1e-12 * std::max(1.0, parent_sse);
    return best_split_impl(X, rows, features, min_samples_leaf, min_gain, [&]() {
        return SseScore{y, total, rows.size()};
    });
}

std::optional<SplitResult> best_split_gh(const Eigen::MatrixXd& X, const Eigen::VectorXd& g,
                                         const Eigen::VectorXd& h, std::span<const int> rows,
                                         std::span<const int> features, int min_samples_leaf,
                                         double lambda) {
    double total_g = 0.0, total_h = 0.0;
    for (int r : rows) {
        total_g += g[r];
        total_h += h[r];
    }
    const double parent_score = total_g * total_g / (total_h + lambda);
    const double min_gain = 1e-12 * std::max(1.0, parent_score);
    return best_split_impl(X, rows, features, min_samples_leaf, min_gain, [&]() {
        return GhScore{g, h, total_g, total_h, lambda};
    });
}

namespace {

struct GrowJob {
    int node;
    std::size_t begin;
    std::size_t end;
    int depth;
};

// Shared depth-first growth; `leaf_value` and `find_split` define the
// flavor (mean/SSE vs second-order).
template <typename LeafValue, typename FindSplit>
RegressionTree grow_impl(const Eigen::MatrixXd& X, std::span<const int> rows,
                         const TreeConfig& config, int mtry, Rng* rng,
                         const LeafValue& leaf_value, const FindSplit& find_split) {
    RegressionTree tree;
    std::vector<int> order(rows.begin(), rows.end());
    const Eigen::Index p = X.cols();
    const bool subsample = rng != nullptr && mtry > 0 && mtry < p;
    const std::vector<int> full_features = all_features(p);

    std::vector<int> pool;  // feature sampling scratch
    std::vector<GrowJob> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, 0, order.size(), 0});

    std::vector<int> scratch;
    while (!stack.empty()) {
        const GrowJob job = stack.back();
        stack.pop_back();
        const std::span<const int> node_rows(order.data() + job.begin, job.end - job.begin);

        TreeNode& node = tree.nodes[static_cast<std::size_t>(job.node)];
        node.n_samples = static_cast<int>(node_rows.size());
        node.value = leaf_value(node_rows);

        if (job.depth >= config.max_depth ||
            node_rows.size() < 2 * static_cast<std::size_t>(config.min_samples_leaf)) {
            continue;
        }

        std::optional<SplitResult> split;
        if (subsample) {
            pool = full_features;
            for (int k = 0; k < mtry; ++k) {
                const auto pick =
                    k + static_cast<int>(rng->uniform_int(static_cast<std::uint64_t>(
                            static_cast<int>(pool.size()) - k)));
                std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(pick)]);
            }
            pool.resize(static_cast<std::size_t>(mtry));
            std::sort(pool.begin(), pool.end());
            split = find_split(node_rows, pool);
        } else {
            split = find_split(node_rows, full_features);
        }
        if (!split) continue;

        // Stable partition by the split predicate, preserving row order.
        scratch.clear();
        std::size_t mid = job.begin;
        for (std::size_t i = job.begin; i < job.end; ++i) {
            if (X(order[i], split->feature) <= split->threshold) {
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
        TreeNode& parent = tree.nodes[static_cast<std::size_t>(job.node)];
        parent.feature = split->feature;
        parent.threshold = split->threshold;
        parent.gain = split->gain;
        parent.left = left;
        parent.right = right;
        stack.push_back({right, mid, job.end, job.depth + 1});
        stack.push_back({left, job.begin, mid, job.depth + 1});
    }
    return tree;
}

}  // namespace

RegressionTree grow_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         std::span<const int> rows, const TreeConfig& config, int mtry, Rng* rng) {
    if (rows.empty()) throw FitError("grow_tree: no rows");
    auto leaf_value = [&](std::span<const int> r) {
        double sum = 0.0;
        for (int i : r) sum += y[i];
        return sum / static_cast<double>(r.size());
    };
    auto find_split = [&](std::span<const int> r, std::span<const int> feats) {
        return best_split(X, y, r, feats, config.min_samples_leaf);
    };
    return grow_impl(X, rows, config, mtry, rng, leaf_value, find_split);
}

RegressionTree grow_tree_gh(const Eigen::MatrixXd& X, const Eigen::VectorXd& g,
                            const Eigen::VectorXd& h, std::span<const int> rows,
                            const TreeConfig& config, double lambda) {
    if (rows.empty()) throw FitError("grow_tree_gh: no rows");
    auto leaf_value = [&](std::span<const int> r) {
        double gs = 0.0, hs = 0.0;
        for (int i : r) {
            gs += g[i];
            hs += h[i];
        }
        return -gs / (hs + lambda);
    };
    auto find_split = [&](std::span<const int> r, std::span<const int> feats) {
        return best_split_gh(X, g, h, r, feats, config.min_samples_leaf, lambda);
    };
    return grow_impl(X, rows, config, 0, nullptr, leaf_value, find_split);
}

}  // namespace ozonecast
