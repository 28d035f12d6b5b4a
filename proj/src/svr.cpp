#include "ozonecast/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ozonecast/errors.hpp"

namespace ozonecast {

namespace {

constexpr double kBoundSlack = 1e-10;  // at-bound classification
constexpr double kMinGain = 1e-14;     // minimum dual objective improvement

double kernel_value(const SvrConfig& cfg, double gamma, const Eigen::RowVectorXd& a,
                    const Eigen::RowVectorXd& b) {
    if (cfg.kernel == SvrConfig::Kernel::kLinear) return a.dot(b);
    return std::exp(-gamma * (a - b).squaredNorm());
}

// Dual state for the epsilon-insensitive problem in terms of
// beta_i = alpha_i - alpha_i^* with sum(beta) = 0 and |beta_i| <= C.
struct Solver {
    const Eigen::MatrixXd& X;
    const Eigen::VectorXd& y;
    const SvrConfig& cfg;
    double gamma;
    Eigen::Index n;
    Eigen::MatrixXd gram;       // full kernel matrix (n is modest here)
    Eigen::VectorXd beta;
    Eigen::VectorXd g;          // g_i = sum_j beta_j K_ij  (f without bias)
    double bias = 0.0;

    Solver(const Eigen::MatrixXd& X_, const Eigen::VectorXd& y_, const SvrConfig& cfg_,
           double gamma_)
        : X(X_), y(y_), cfg(cfg_), gamma(gamma_), n(X_.rows()) {
        if (cfg.kernel == SvrConfig::Kernel::kLinear) {
            gram = X * X.transpose();
        } else {
            const Eigen::VectorXd sq = X.rowwise().squaredNorm();
            gram = -2.0 * (X * X.transpose());
            gram.colwise() += sq;
            gram.rowwise() += sq.transpose();
            gram = (-gamma * gram.cwiseMax(0.0)).array().exp();
        }
        beta = Eigen::VectorXd::Zero(n);
        g = Eigen::VectorXd::Zero(n);
        recompute_bias();
    }

    // Residual r_i = y_i - f(x_i).
    double residual(Eigen::Index i) const { return y[i] - (g[i] + bias); }

    // Bias from free points when any exist, else the midpoint of the
    // feasible interval implied by the bound/zero points.
    void recompute_bias() {
        const double C = cfg.c;
        double free_sum = 0.0;
        int free_count = 0;
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n; ++i) {
            const double target = y[i] - g[i];
            const double b = beta[i];
            if (b > kBoundSlack && b < C - kBoundSlack) {
                free_sum += target - cfg.epsilon;
                ++free_count;
            } else if (b < -kBoundSlack && b > -C + kBoundSlack) {
                free_sum += target + cfg.epsilon;
                ++free_count;
            } else if (std::abs(b) <= kBoundSlack) {
                lo = std::max(lo, target - cfg.epsilon);
                hi = std::min(hi, target + cfg.epsilon);
            } else if (b >= C - kBoundSlack) {
                hi = std::min(hi, target - cfg.epsilon);
            } else {  // b <= -C + kBoundSlack
                lo = std::max(lo, target + cfg.epsilon);
            }
        }
        if (free_count > 0) {
            bias = free_sum / free_count;
        } else if (std::isfinite(lo) && std::isfinite(hi)) {
            bias = 0.5 * (lo + hi);
        } else if (std::isfinite(lo)) {
            bias = lo;
        } else if (std::isfinite(hi)) {
            bias = hi;
        }
    }

    // KKT violation of point i under the current (g, bias).
    double violation(Eigen::Index i) const {
        const double C = cfg.c;
        const double r = residual(i);
        const double b = beta[i];
        if (b >= C - kBoundSlack) return std::max(0.0, cfg.epsilon - r);
        if (b <= -C + kBoundSlack) return std::max(0.0, r + cfg.epsilon);
        if (b > kBoundSlack) return std::abs(r - cfg.epsilon);
        if (b < -kBoundSlack) return std::abs(r + cfg.epsilon);
        return std::max(0.0, std::abs(r) - cfg.epsilon);
    }

    double max_violation(Eigen::Index* arg = nullptr) const {
        double worst = 0.0;
        Eigen::Index worst_i = -1;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double v = violation(i);
            if (v > worst) {
                worst = v;
                worst_i = i;
            }
        }
        if (arg) *arg = worst_i;
        return worst;
    }

    // Exact two-variable subproblem along beta_i += t, beta_j -= t. The
    // dual objective change is piecewise quadratic with kinks where either
    // coefficient crosses zero; every segment optimum and kink is tested.
    bool update_pair(Eigen::Index i, Eigen::Index j) {
        if (i == j) return false;
        const double C = cfg.c;
        const double eta = gram(i, i) + gram(j, j) - 2.0 * gram(i, j);
        const double lo = std::max(-C - beta[i], beta[j] - C);
        const double hi = std::min(C - beta[i], beta[j] + C);
        if (hi - lo < 1e-15) return false;

        // d(smooth)/dt at t = 0; epsilon terms handled per segment.
        const double slope0 = (y[i] - g[i]) - (y[j] - g[j]);

        std::vector<double> candidates;
        candidates.reserve(8);
        auto add_candidate = [&](double t) {
            if (t > lo - 1e-15 && t < hi + 1e-15) candidates.push_back(std::clamp(t, lo, hi));
        };
        add_candidate(lo);
        add_candidate(hi);
        add_candidate(-beta[i]);
        add_candidate(beta[j]);
        if (eta > 1e-15) {
            for (const double si : {-1.0, 1.0}) {
                for (const double sj : {-1.0, 1.0}) {
                    add_candidate((slope0 - cfg.epsilon * (si - sj)) / eta);
                }
            }
        }

        // Objective change, exact for each candidate step.
        auto delta_objective = [&](double t) {
            const double smooth = slope0 * t - 0.5 * eta * t * t;
            const double l1 = -cfg.epsilon * (std::abs(beta[i] + t) - std::abs(beta[i]) +
                                              std::abs(beta[j] - t) - std::abs(beta[j]));
            return smooth + l1;
        };

        double best_t = 0.0;
        double best_gain = 0.0;
        for (double t : candidates) {
            const double gain = delta_objective(t);
            if (gain > best_gain) {
                best_gain = gain;
                best_t = t;
            }
        }
        if (best_gain <= kMinGain) return false;

        beta[i] += best_t;
        beta[j] -= best_t;
        // Snap coefficients that landed numerically on a bound or zero.
        for (Eigen::Index k : {i, j}) {
            if (std::abs(beta[k]) < kBoundSlack) beta[k] = 0.0;
            if (std::abs(beta[k] - C) < kBoundSlack) beta[k] = C;
            if (std::abs(beta[k] + C) < kBoundSlack) beta[k] = -C;
        }
        g += best_t * (gram.col(i) - gram.col(j));
        recompute_bias();
        return true;
    }

    // Second index: maximal |E_i1 - E_j| first, then runner-up violators.
    bool step(Eigen::Index i1) {
        const double e1 = residual(i1);
        Eigen::Index best_j = -1;
        double best_gap = -1.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i1) continue;
            const double gap = std::abs(e1 - residual(j));
            if (gap > best_gap) {
                best_gap = gap;
                best_j = j;
            }
        }
        if (best_j >= 0 && update_pair(i1, best_j)) return true;

        // Fall back to the next-worst violators.
        std::vector<std::pair<double, Eigen::Index>> order;
        order.reserve(static_cast<std::size_t>(n));
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i1 && j != best_j) order.emplace_back(violation(j), j);
        }
        std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        const std::size_t tries = std::min<std::size_t>(order.size(), 8);
        for (std::size_t k = 0; k < tries; ++k) {
            if (update_pair(i1, order[k].second)) return true;
        }
        return false;
    }
};

}  // namespace

double svr_default_gamma(const Eigen::MatrixXd& X) {
    const double n = static_cast<double>(X.size());
    const double mean = X.mean();
    const double var = (X.array() - mean).square().sum() / n;
    if (var <= 0.0 || X.cols() == 0) return 1.0;
    return 1.0 / (static_cast<double>(X.cols()) * var);
}

SvrModel fit_svr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const SvrConfig& config) {
    if (X.rows() == 0) throw FitError("fit_svr: empty training set");
    if (X.rows() != y.size()) throw FitError("fit_svr: row count mismatch");
    if (config.c <= 0.0) throw FitError("fit_svr: C must be > 0");
    if (config.epsilon < 0.0) throw FitError("fit_svr: epsilon must be >= 0");

    const double gamma = config.gamma > 0.0 ? config.gamma : svr_default_gamma(X);
    Solver solver(X, y, config, gamma);

    const Eigen::Index n = X.rows();
    bool converged = false;
    for (int pass = 0; pass < config.max_passes && !converged; ++pass) {
        int updates = 0;
        std::vector<bool> stuck(static_cast<std::size_t>(n), false);
        for (Eigen::Index it = 0; it < n; ++it) {
            // Worst non-stuck violator.
            Eigen::Index worst = -1;
            double worst_v = config.tol;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (stuck[static_cast<std::size_t>(i)]) continue;
                const double v = solver.violation(i);
                if (v > worst_v) {
                    worst_v = v;
                    worst = i;
                }
            }
            if (worst < 0) break;
            if (solver.step(worst)) {
                ++updates;
            } else {
                stuck[static_cast<std::size_t>(worst)] = true;
            }
        }
        converged = solver.max_violation() <= config.tol;
        if (!converged && updates == 0) break;  // fully stagnant pass
    }

    SvrModel model;
    model.config = config;
    model.gamma_used = gamma;
    model.bias = solver.bias;
    model.dual_coef = solver.beta;
    model.final_violation = solver.max_violation();
    model.converged = model.final_violation <= config.tol;

    std::vector<Eigen::Index> sv;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (solver.beta[i] != 0.0) sv.push_back(i);
    }
    model.support_X.resize(static_cast<Eigen::Index>(sv.size()), X.cols());
    model.support_beta.resize(static_cast<Eigen::Index>(sv.size()));
    for (std::size_t k = 0; k < sv.size(); ++k) {
        model.support_X.row(static_cast<Eigen::Index>(k)) = X.row(sv[k]);
        model.support_beta[static_cast<Eigen::Index>(k)] = solver.beta[sv[k]];
    }
    return model;
}

Eigen::VectorXd SvrModel::predict(const Eigen::MatrixXd& X) const {
    if (support_X.cols() > 0 && X.cols() != support_X.cols()) {
        throw PredictError("svr: feature count mismatch");
    }
    Eigen::VectorXd out = Eigen::VectorXd::Constant(X.rows(), bias);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        double acc = 0.0;
        for (Eigen::Index s = 0; s < support_X.rows(); ++s) {
            acc += support_beta[s] * kernel_value(config, gamma_used, support_X.row(s), X.row(i));
        }
        out[i] += acc;
    }
    return out;
}

}  // namespace ozonecast
