#include "ozonecast/mlp.hpp"

#include <cmath>

#include "ozonecast/errors.hpp"
#include "ozonecast/rng.hpp"

namespace ozonecast {

namespace {

Eigen::MatrixXd activate(const Eigen::MatrixXd& z, MlpConfig::Activation act) {
    if (act == MlpConfig::Activation::kTanh) return z.array().tanh().matrix();
    return z.cwiseMax(0.0);
}

Eigen::MatrixXd activate_grad(const Eigen::MatrixXd& z, MlpConfig::Activation act) {
    if (act == MlpConfig::Activation::kTanh) {
        return (1.0 - z.array().tanh().square()).matrix();
    }
    return (z.array() > 0.0).cast<double>().matrix();
}

struct Gradients {
    Eigen::MatrixXd W1;
    Eigen::VectorXd b1, w2;
    double b2 = 0.0;
};

// Batch MSE and its gradient. Rows of X are samples.
double forward_backward(const MlpModel& m, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        Gradients* grads) {
    const double n = static_cast<double>(X.rows());
    const Eigen::MatrixXd Z1 = (X * m.W1.transpose()).rowwise() + m.b1.transpose();
    const Eigen::MatrixXd A1 = activate(Z1, m.config.activation);
    const Eigen::VectorXd yhat = (A1 * m.w2).array() + m.b2;
    const Eigen::VectorXd err = yhat - y;
    const double loss = err.squaredNorm() / n;
    if (grads) {
        const Eigen::VectorXd delta = 2.0 * err / n;
        grads->w2 = A1.transpose() * delta;
        grads->b2 = delta.sum();
        const Eigen::MatrixXd dZ1 =
            (delta * m.w2.transpose()).cwiseProduct(activate_grad(Z1, m.config.activation));
        grads->W1 = dZ1.transpose() * X;
        grads->b1 = dZ1.colwise().sum();
    }
    return loss;
}

template <typename M>
inline void adam_update(M& param, M& m, M& v, const M& g, const MlpConfig& cfg, double lr,
                        double bc1, double bc2) {
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = (cfg.beta2 * v.array() + (1.0 - cfg.beta2) * g.array().square()).matrix();
    param.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + cfg.adam_eps);
}

}  // namespace

Eigen::VectorXd MlpModel::predict(const Eigen::MatrixXd& X) const {
    if (X.cols() != W1.cols()) throw PredictError("mlp: feature count mismatch");
    const Eigen::MatrixXd Z1 = (X * W1.transpose()).rowwise() + b1.transpose();
    return (activate(Z1, config.activation) * w2).array() + b2;
}

MlpModel init_mlp(int p, int hidden, MlpConfig::Activation activation, std::uint64_t seed) {
    if (p < 1 || hidden < 1) throw FitError("init_mlp: p and hidden must be >= 1");
    MlpModel m;
    m.config.hidden = hidden;
    m.config.activation = activation;
    m.seed = seed;

    Rng rng = Rng(seed).derive(0xA11);
    const double limit1 = std::sqrt(6.0 / static_cast<double>(p + hidden));
    const double limit2 = std::sqrt(6.0 / static_cast<double>(hidden + 1));
    m.W1.resize(hidden, p);
    for (int i = 0; i < hidden; ++i) {
        for (int j = 0; j < p; ++j) m.W1(i, j) = rng.uniform(-limit1, limit1);
    }
    m.w2.resize(hidden);
    for (int i = 0; i < hidden; ++i) m.w2[i] = rng.uniform(-limit2, limit2);
    m.b1 = Eigen::VectorXd::Zero(hidden);
    m.b2 = 0.0;

    m.mW1 = Eigen::MatrixXd::Zero(hidden, p);
    m.vW1 = Eigen::MatrixXd::Zero(hidden, p);
    m.mb1 = Eigen::VectorXd::Zero(hidden);
    m.vb1 = Eigen::VectorXd::Zero(hidden);
    m.mw2 = Eigen::VectorXd::Zero(hidden);
    m.vw2 = Eigen::VectorXd::Zero(hidden);
    return m;
}

std::vector<double> train_mlp(MlpModel& model, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              int epochs, int batch_size, double learning_rate) {
    if (X.rows() != y.size()) throw FitError("train_mlp: row count mismatch");
    if (X.cols() != model.W1.cols()) throw FitError("train_mlp: feature count mismatch");
    if (batch_size < 1) throw FitError("train_mlp: batch_size must be >= 1");

    const auto n = static_cast<std::size_t>(X.rows());
    std::vector<double> trace;
    trace.reserve(static_cast<std::size_t>(epochs));
    Gradients g;

    for (int epoch = 0; epoch < epochs; ++epoch) {
        Rng shuffle_rng = Rng(model.seed).derive(0xE0 + static_cast<std::uint64_t>(epoch));
        const std::vector<int> perm = shuffle_rng.permutation(n);

        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(batch_size)) {
            const std::size_t stop = std::min(n, start + static_cast<std::size_t>(batch_size));
            const auto bs = static_cast<Eigen::Index>(stop - start);
            Eigen::MatrixXd Xb(bs, X.cols());
            Eigen::VectorXd yb(bs);
            for (Eigen::Index i = 0; i < bs; ++i) {
                Xb.row(i) = X.row(perm[start + static_cast<std::size_t>(i)]);
                yb[i] = y[perm[start + static_cast<std::size_t>(i)]];
            }
            forward_backward(model, Xb, yb, &g);

            ++model.step;
            const double bc1 = 1.0 - std::pow(model.config.beta1, static_cast<double>(model.step));
            const double bc2 = 1.0 - std::pow(model.config.beta2, static_cast<double>(model.step));
            adam_update(model.W1, model.mW1, model.vW1, g.W1, model.config, learning_rate, bc1,
                        bc2);
            adam_update(model.b1, model.mb1, model.vb1, g.b1, model.config, learning_rate, bc1,
                        bc2);
            adam_update(model.w2, model.mw2, model.vw2, g.w2, model.config, learning_rate, bc1,
                        bc2);
            // Scalar output bias follows the same rule.
            model.mb2 = model.config.beta1 * model.mb2 + (1.0 - model.config.beta1) * g.b2;
            model.vb2 = model.config.beta2 * model.vb2 + (1.0 - model.config.beta2) * g.b2 * g.b2;
            model.b2 -= learning_rate * (model.mb2 / bc1) /
                        (std::sqrt(model.vb2 / bc2) + model.config.adam_eps);
        }

        const double epoch_loss = forward_backward(model, X, y, nullptr);
        if (!std::isfinite(epoch_loss)) throw DivergenceError(epoch);
        trace.push_back(epoch_loss);
    }
    return trace;
}

MlpModel fit_mlp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const MlpConfig& config,
                 std::uint64_t seed) {
    MlpModel model = init_mlp(static_cast<int>(X.cols()), config.hidden, config.activation, seed);
    model.config = config;
    train_mlp(model, X, y, config.epochs, config.batch_size, config.learning_rate);
    return model;
}

MlpGradients mlp_gradients(const MlpModel& model, const Eigen::MatrixXd& X,
                           const Eigen::VectorXd& y) {
    Gradients g;
    forward_backward(model, X, y, &g);
    return {std::move(g.W1), std::move(g.b1), std::move(g.w2), g.b2};
}

double gradient_check(const MlpModel& model, const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    Gradients analytic;
    forward_backward(model, X, y, &analytic);

    MlpModel probe = model;
    constexpr double step = 1e-5;
    double worst = 0.0;
    auto check = [&](double& param, double ga) {
        const double saved = param;
        param = saved + step;
        const double up = forward_backward(probe, X, y, nullptr);
        param = saved - step;
        const double down = forward_backward(probe, X, y, nullptr);
        param = saved;
        const double gn = (up - down) / (2.0 * step);
        const double rel = std::abs(ga - gn) / std::max({std::abs(ga), std::abs(gn), 1e-8});
        worst = std::max(worst, rel);
    };

    for (Eigen::Index i = 0; i < probe.W1.rows(); ++i) {
        for (Eigen::Index j = 0; j < probe.W1.cols(); ++j) check(probe.W1(i, j), analytic.W1(i, j));
    }
    for (Eigen::Index i = 0; i < probe.b1.size(); ++i) check(probe.b1[i], analytic.b1[i]);
    for (Eigen::Index i = 0; i < probe.w2.size(); ++i) check(probe.w2[i], analytic.w2[i]);
    check(probe.b2, analytic.b2);
    return worst;
}

}  // namespace ozonecast
