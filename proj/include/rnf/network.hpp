#pragma once

// Discretized random-neural-field networks: the five benchmark
// architectures, batched forward pass with retained trace, and reverse-mode
// gradients for the trainable parameters {W_tilde, beta, head}.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rnf/random_fields.hpp"

namespace rnf {

enum class LayerKind { MaskedDense, MaxPool };
enum class Activation { ReLU, Identity };

struct LayerSpec {
  LayerKind kind = LayerKind::MaskedDense;
  int n_in = 0;
  int n_out = 0;
  ReceptiveFieldSpec rf;                // dense layers
  std::optional<CovarianceSpec> cov;    // dense layers; nullopt = independent
  Activation activation = Activation::ReLU;
  int pool_window = 2;                  // pool layers
  int pool_stride = 2;
};

struct Layer {
  LayerSpec spec;
  WeightBundle weights;  // dense layers only
};

struct ModelConfig {
  int model_id = 5;
  int width = 2048;                  // hidden width
  int n_in = 784;
  int n_classes = 10;
  std::optional<double> sigma_r;     // default: per-model tuned value
  std::optional<double> sigma_s;
  double sigma_w = 1.0;
  double sigma_b = 0.1;
  double nu = 0.5;                   // Matern smoothness (Model 4)
  int pool_window = 2;
  int pool_stride = 2;
  std::uint64_t seed = 1;

  /// sigma_r/sigma_s with per-model tuned defaults filled in.
  double resolved_sigma_r() const;
  double resolved_sigma_s() const;
};

struct NetworkModel {
  ModelConfig config;
  std::vector<Layer> layers;
  Eigen::MatrixXd head_w_tilde;  // n_last x C, trainable
  Eigen::MatrixXd head_w;        // derived: sigma_w / sqrt(n_last) * head_w_tilde

  int n_in() const { return layers.front().spec.n_in; }
  int n_out() const { return static_cast<int>(head_w.cols()); }
  long param_count() const;
  void refresh_head();
  /// Refresh all derived weights after a trainable-parameter update.
  void refresh();
};

/// Build one of the five benchmark models:
///   1: masked dense (Gaussian filter, Gaussian covariance) -> dense -> dense
///   2: masked dense (Gaussian filter, Gaussian covariance) -> max-pool -> dense
///   3: masked dense (Mexican hat, Gaussian covariance) -> dense -> dense
///   4: masked dense (Gaussian filter, Matern covariance) -> dense -> dense
///   5: dense -> dense -> dense (independent NTK-parameterized weights)
/// plus a linear 10-column readout head in all cases. Only the first layer
/// is a field; later layers have no mask and independent weights.
NetworkModel build_model(const ModelConfig& config);

struct ForwardTrace {
  // acts[0] = input batch; acts[l + 1] = output of layer l (post
  // activation / pooling); the last entry feeds the head.
  std::vector<Eigen::MatrixXd> acts;
  std::vector<Eigen::MatrixXd> pre;      // dense pre-activations, else empty
  std::vector<Eigen::MatrixXi> argmax;   // pool input indices, else empty
  Eigen::MatrixXd outputs;               // N x C
};

ForwardTrace forward(const NetworkModel& net, const Eigen::MatrixXd& x);

struct Gradients {
  std::vector<Eigen::MatrixXd> d_w_tilde;  // per layer; empty for pool
  std::vector<Eigen::VectorXd> d_beta;
  Eigen::MatrixXd d_head_w_tilde;
};

struct BackwardResult {
  Gradients grads;
  // delta[l]: N x n_l cotangent at the pre-activation of dense layer l
  std::vector<Eigen::MatrixXd> delta;
};

/// Reverse-mode differentiation of the loss cotangent dL/df (N x C)
/// through the network. ReLU subgradient at 0 is 0; max-pool routes to the
/// stored argmax.
BackwardResult backward(const NetworkModel& net, const ForwardTrace& trace,
                        const Eigen::MatrixXd& cotangent);

/// Per-class backprop signals for the tangent kernel: result[l] is
/// (N*C) x n_l with row i*C + k holding d f_k(x_i) / d h^l. Entries for
/// pool layers are empty.
std::vector<Eigen::MatrixXd> class_signals(const NetworkModel& net,
                                           const ForwardTrace& trace);

/// Max-pool over a 1-D vector; ties break toward the lowest index.
/// Returns the pooled values and absolute argmax indices.
std::pair<Eigen::VectorXd, Eigen::VectorXi> max_pool_forward(
    const Eigen::VectorXd& x, int window, int stride);

void save_checkpoint(const NetworkModel& net, const std::string& path);
NetworkModel load_checkpoint(const std::string& path);

}  // namespace rnf
