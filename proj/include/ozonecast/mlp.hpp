#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ozonecast/model.hpp"

namespace ozonecast {

struct MlpConfig {
    enum class Activation { kTanh, kRelu };
    int hidden = 100;
    Activation activation = Activation::kRelu;
    int epochs = 200;
    int batch_size = 32;
    double learning_rate = 1e-3;
    double beta1 = 0.9;  // first/second moment decay
    double beta2 = 0.999;
    double adam_eps = 1e-8;
};

/// Single-hidden-layer perceptron regressor trained by mini-batch
/// gradient descent with adaptive moment estimates on the squared error.
class MlpModel : public Regressor {
  public:
    Eigen::MatrixXd W1;  // hidden x p
    Eigen::VectorXd b1;  // hidden
    Eigen::VectorXd w2;  // hidden
    double b2 = 0.0;
    MlpConfig config;
    std::uint64_t seed = 0;

    // Optimizer state, kept so training can resume.
    Eigen::MatrixXd mW1, vW1;
    Eigen::VectorXd mb1, vb1, mw2, vw2;
    double mb2 = 0.0, vb2 = 0.0;
    long step = 0;

    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const override;
};

/// Glorot-uniform weights (limit sqrt(6/(fan_in+fan_out))), zero biases,
/// deterministic per seed.
MlpModel init_mlp(int p, int hidden, MlpConfig::Activation activation, std::uint64_t seed);

/// Trains in place with per-epoch seeded shuffling and returns the
/// training MSE after each epoch. A non-finite loss raises
/// DivergenceError naming the epoch.
std::vector<double> train_mlp(MlpModel& model, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              int epochs, int batch_size, double learning_rate);

/// Convenience: init + train with the config's settings.
MlpModel fit_mlp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const MlpConfig& config,
                 std::uint64_t seed);

/// Analytic gradient of the batch MSE, the quantity training descends on.
struct MlpGradients {
    Eigen::MatrixXd W1;
    Eigen::VectorXd b1, w2;
    double b2 = 0.0;
};
MlpGradients mlp_gradients(const MlpModel& model, const Eigen::MatrixXd& X,
                           const Eigen::VectorXd& y);

/// Compares the analytic gradient of the batch MSE against central finite
/// differences (step 1e-5) over every parameter; returns the maximum
/// relative error max |ga-gn| / max(|ga|,|gn|,1e-8).
double gradient_check(const MlpModel& model, const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

}  // namespace ozonecast
