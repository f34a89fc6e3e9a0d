#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "dimlift/data_model.hpp"

namespace dimlift {

/// Fully connected autoencoder with a sigmoid on every layer. Layer l maps
/// a_l to a_{l+1} = sigmoid(W_l^T a_l + b_l); W_l is fan_in x fan_out.
struct AutoencoderModel {
  std::vector<int> layer_sizes;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  std::uint64_t seed = 0;

  int input_dim() const noexcept { return layer_sizes.empty() ? 0 : layer_sizes.front(); }
  std::size_t layers() const noexcept { return weights.size(); }
  /// Throws Error(dimension) if shapes disagree or a parameter is non-finite.
  void validate() const;
};

/// Hidden widths of the default d-48-24-48-d network.
inline const std::vector<int> kDefaultHidden{48, 24, 48};

/// Glorot-uniform weights, zero biases.
AutoencoderModel init_model(const std::vector<int>& layer_sizes, std::uint64_t seed);
AutoencoderModel init_model(int d, std::uint64_t seed);

/// Activations of every layer for a batch (one sample per column);
/// front() is the input and back() the reconstruction.
std::vector<Eigen::MatrixXd> forward_batch(const AutoencoderModel& model,
                                           const Eigen::Ref<const Eigen::MatrixXd>& x);

struct ForwardResult {
  Eigen::VectorXd reconstruction;
  std::vector<Eigen::MatrixXd> activations;
};

ForwardResult forward(const AutoencoderModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

/// Mean squared reconstruction error over all samples and coordinates,
/// with its gradient with respect to every parameter.
double loss_and_gradients(const AutoencoderModel& model, const Eigen::Ref<const Eigen::MatrixXd>& x,
                          Gradients* grads);

struct TrainConfig {
  double learning_rate = 1e-4;
  int max_iterations = 1000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

struct AdamState {
  std::vector<Eigen::MatrixXd> m_weights, v_weights;
  std::vector<Eigen::VectorXd> m_biases, v_biases;
  long step = 0;

  static AdamState zeros_like(const AutoencoderModel& model);
};

void adam_step(AutoencoderModel& model, const Gradients& grads, AdamState& state,
               const TrainConfig& cfg);

struct TrainingTrace {
  std::vector<double> losses;  // loss before each optimizer step
  std::optional<int> iterations_to_tolerance;

  /// 1-based iteration at which the loss first drops to factor * final loss.
  std::optional<int> iterations_to_within(double factor) const;
};

struct TrainResult {
  AutoencoderModel model;
  TrainingTrace trace;
};

/// max_iterations full-batch Adam steps on x (one sample per column, scaled
/// to [0, 1]). iterations_to_tolerance is filled with the 110% criterion.
TrainResult train(AutoencoderModel model, const Eigen::Ref<const Eigen::MatrixXd>& x,
                  const TrainConfig& cfg);

/// sqrt(mean((x - reconstruction)^2)).
double rmse_indicator(const AutoencoderModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// RMSE of every column of a batch.
Eigen::VectorXd rmse_batch(const AutoencoderModel& model, const Eigen::Ref<const Eigen::MatrixXd>& x);

/// Per-coordinate min-max scaling fitted on a training block. Coordinates
/// with zero training range map to the constant 0.5 and are reported.
struct MinMaxScaler {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  static MinMaxScaler fit(const Eigen::Ref<const Eigen::MatrixXd>& x);
  Eigen::MatrixXd transform(const Eigen::Ref<const Eigen::MatrixXd>& x) const;
  std::vector<int> constant_coordinates() const;
};

struct SaeConfig {
  std::optional<LiftConfig> lift;  // unit-norm lift before scaling when set
  long train_begin = 1;            // inclusive sample indices
  long train_end = 200;
  std::vector<int> hidden = kDefaultHidden;
  TrainConfig train;
};

struct SaeReport {
  IndicatorSeries rmse_raw;    // samples after the training span
  IndicatorSeries rmse_curve;  // normalized to [0, 1]
  AutoencoderModel model;
  MinMaxScaler scaler;
  TrainingTrace trace;
  std::vector<int> constant_coordinates;
};

/// Lifts (optionally), fits the scaler and trains on the training span, then
/// scores every later sample.
SaeReport run_sae(const SpatioTemporalMatrix& d, const SaeConfig& cfg);

/// Inference only: applies a trained model and scaler to the samples after
/// train_end. Produces the same curve as the run that trained the model.
SaeReport score_sae(const SpatioTemporalMatrix& d, const SaeConfig& cfg,
                    const AutoencoderModel& model, const MinMaxScaler& scaler);

}  // namespace dimlift
