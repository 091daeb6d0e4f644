#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mist/dataset.hpp"

namespace mist {

/// Trainable tensors of the clustering MLP d - h1 - ... - C.
/// Hidden layer l computes relu(batchnorm(x W_l + b_l)); the last layer
/// feeds a softmax. Weights are stored fan_in x fan_out.
struct MlpParams {
  std::vector<Matrix> weights;
  std::vector<RowVector> biases;
  std::vector<RowVector> bn_scale;  // one per hidden layer
  std::vector<RowVector> bn_shift;

  [[nodiscard]] MlpParams zeros_like() const;
  [[nodiscard]] std::size_t parameter_count() const;

  /// Named flat views over every tensor, in a fixed order.
  std::vector<std::pair<std::string, std::span<double>>> views();
  std::vector<std::pair<std::string, std::span<const double>>> views() const;

  MlpParams& operator+=(const MlpParams& other);
  MlpParams& operator*=(double s);
};

struct MlpState {
  MlpParams params;
  std::vector<RowVector> running_mean;
  std::vector<RowVector> running_var;
  double bn_momentum = 0.1;
  double bn_eps = 1e-5;

  [[nodiscard]] Index input_dim() const { return params.weights.front().rows(); }
  [[nodiscard]] Index num_clusters() const { return params.weights.back().cols(); }
  [[nodiscard]] std::size_t hidden_layers() const { return params.bn_scale.size(); }
};

enum class Mode { Train, Eval };

/// He-normal weights (std sqrt(2 / fan_in)), zero biases, BN scale 1 and
/// shift 0, running mean 0 and variance 1.
MlpState init_mlp(Index input_dim, const std::vector<Index>& hidden, Index num_clusters,
                  std::uint64_t seed);

/// Everything backward() needs from one forward pass.
struct ForwardCache {
  Mode mode = Mode::Train;
  std::vector<Matrix> inputs;      // input to each dense layer; inputs[0] is the batch
  std::vector<Matrix> normalized;  // BN-normalized pre-activations per hidden layer
  std::vector<RowVector> inv_std;
  Matrix logits;
  Matrix probs;
  Matrix log_probs;

  [[nodiscard]] Index batch_size() const { return logits.rows(); }
};

/// Train mode normalizes with batch statistics (needs >= 2 rows); eval mode
/// uses the running statistics. Running statistics change only when
/// `update_running_stats` is set and the mode is Train.
ForwardCache forward(MlpState& state, const Matrix& x, Mode mode, bool update_running_stats);
ForwardCache forward(const MlpState& state, const Matrix& x, Mode mode);

/// Maps dL/dprobs to dL/dlogits through the row-wise softmax.
Matrix softmax_backward(const Matrix& probs, const Matrix& grad_probs);

struct Backprop {
  MlpParams grads;
  Matrix input_grad;
};

/// Exact reverse pass of `forward` for upstream gradient dL/dlogits,
/// including the dependence of batch statistics on every row.
Backprop backward(const MlpState& state, const ForwardCache& cache, const Matrix& grad_logits);

struct AdamState {
  MlpParams first_moment;
  MlpParams second_moment;
  std::int64_t step = 0;
  double lr = 0.002;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

AdamState init_adam(const MlpState& state, double lr);

/// Bias-corrected Adam update. Throws std::runtime_error naming the first
/// tensor whose gradient holds NaN or Inf; parameters are left unchanged.
void adam_step(MlpParams& params, AdamState& adam, const MlpParams& grads);

/// Eval-mode forward in chunks, argmax per row with ties to the lowest index.
Labels predict(const MlpState& state, const Matrix& features);
Labels argmax_rows(const Matrix& probs);

/// Binary checkpoint, little-endian:
///   "MISTCKPT" | u32 version | u64 config hash | i64 layer count |
///   per layer: i64 fan_in, i64 fan_out |
///   f64 bn_momentum, f64 bn_eps | i64 adam step | f64 lr, beta1, beta2, eps |
///   every tensor of params, first moment, second moment (views() order) |
///   running mean and variance per hidden layer.
void save_checkpoint(const std::filesystem::path& path, const MlpState& state, const AdamState& adam,
                     std::uint64_t config_hash);
struct Checkpoint {
  MlpState state;
  AdamState adam;
  std::uint64_t config_hash = 0;
};
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace mist
