#include "dimlift/autoencoder.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "dimlift/error.hpp"
#include "dimlift/indicators.hpp"
#include "dimlift/lift.hpp"
#include "dimlift/random.hpp"

namespace dimlift {

namespace {

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
  return (1.0 + (-z.array()).exp()).inverse().matrix();
}

// Feature matrix (one column per sample) the detector sees.
Eigen::MatrixXd features(const SpatioTemporalMatrix& d, const SaeConfig& cfg) {
  if (!cfg.lift) return d.values();
  return lift_matrix(d, *cfg.lift, ScaleMode::unit_norm).values();
}

void check_span(const SpatioTemporalMatrix& d, const SaeConfig& cfg) {
  if (cfg.train_begin < d.t0() || cfg.train_end < cfg.train_begin ||
      cfg.train_end >= d.t_end()) {
    std::ostringstream msg;
    msg << "training span " << cfg.train_begin << ".." << cfg.train_end
        << " must lie inside samples " << d.t0() << ".." << d.t_end()
        << " and leave samples to score";
    fail(ErrorKind::window, msg.str());
  }
}

SaeReport score(const Eigen::MatrixXd& scaled, const SpatioTemporalMatrix& d,
                const SaeConfig& cfg, SaeReport report) {
  const long first = cfg.train_end + 1;
  const long offset = first - d.t0();
  const Eigen::VectorXd r = rmse_batch(report.model, scaled.rightCols(scaled.cols() - offset));
  report.rmse_raw = {first, 1, IndicatorKind::rmse, {r.data(), r.data() + r.size()}, std::nullopt};
  report.rmse_curve = normalize_curve(report.rmse_raw);
  report.constant_coordinates = report.scaler.constant_coordinates();
  return report;
}

}  // namespace

void AutoencoderModel::validate() const {
  if (layer_sizes.size() < 2) fail(ErrorKind::dimension, "autoencoder needs at least two layers");
  if (weights.size() != layer_sizes.size() - 1 || biases.size() != weights.size()) {
    fail(ErrorKind::dimension, "autoencoder parameter count does not match its layers");
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != layer_sizes[l] || weights[l].cols() != layer_sizes[l + 1] ||
        biases[l].size() != layer_sizes[l + 1]) {
      fail(ErrorKind::dimension, "layer " + std::to_string(l) + " has inconsistent shapes");
    }
    if (!weights[l].allFinite() || !biases[l].allFinite()) {
      fail(ErrorKind::numerical, "layer " + std::to_string(l) + " has non-finite parameters");
    }
  }
}

AutoencoderModel init_model(const std::vector<int>& layer_sizes, std::uint64_t seed) {
  if (layer_sizes.size() < 2) fail(ErrorKind::config, "autoencoder needs at least two layers");
  for (int s : layer_sizes) {
    if (s < 1) fail(ErrorKind::config, "layer sizes must be positive");
  }
  AutoencoderModel model;
  model.layer_sizes = layer_sizes;
  model.seed = seed;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int fan_in = layer_sizes[l];
    const int fan_out = layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(l)));
    std::uniform_real_distribution<double> u(-limit, limit);
    Eigen::MatrixXd w(fan_in, fan_out);
    for (long j = 0; j < w.cols(); ++j) {
      for (long i = 0; i < w.rows(); ++i) w(i, j) = u(rng);
    }
    model.weights.push_back(std::move(w));
    model.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return model;
}

AutoencoderModel init_model(int d, std::uint64_t seed) {
  if (d < 1) fail(ErrorKind::config, "input dimension must be positive");
  std::vector<int> sizes{d};
  sizes.insert(sizes.end(), kDefaultHidden.begin(), kDefaultHidden.end());
  sizes.push_back(d);
  return init_model(sizes, seed);
}

std::vector<Eigen::MatrixXd> forward_batch(const AutoencoderModel& model,
                                           const Eigen::Ref<const Eigen::MatrixXd>& x) {
  if (x.rows() != model.input_dim()) {
    std::ostringstream msg;
    msg << "input has " << x.rows() << " coordinates, model expects " << model.input_dim();
    fail(ErrorKind::dimension, msg.str());
  }
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(model.layers() + 1);
  acts.emplace_back(x);
  for (std::size_t l = 0; l < model.layers(); ++l) {
    Eigen::MatrixXd z = model.weights[l].transpose() * acts.back();
    z.colwise() += model.biases[l];
    acts.push_back(sigmoid(z));
  }
  return acts;
}

ForwardResult forward(const AutoencoderModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  ForwardResult r;
  r.activations = forward_batch(model, x);
  r.reconstruction = r.activations.back().col(0);
  return r;
}

double loss_and_gradients(const AutoencoderModel& model, const Eigen::Ref<const Eigen::MatrixXd>& x,
                          Gradients* grads) {
  const auto acts = forward_batch(model, x);
  const Eigen::MatrixXd diff = acts.back() - x;
  const double count = static_cast<double>(diff.size());
  const double loss = diff.squaredNorm() / count;
  if (grads == nullptr) return loss;

  const std::size_t layers = model.layers();
  grads->weights.resize(layers);
  grads->biases.resize(layers);
  Eigen::MatrixXd upstream = (2.0 / count) * diff;  // dL/da for the output layer
  for (std::size_t l = layers; l-- > 0;) {
    const Eigen::MatrixXd& a = acts[l + 1];
    const Eigen::MatrixXd delta = upstream.array() * a.array() * (1.0 - a.array());
    grads->weights[l].noalias() = acts[l] * delta.transpose();
    grads->biases[l] = delta.rowwise().sum();
    if (l > 0) upstream.noalias() = model.weights[l] * delta;
  }
  return loss;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    fail(ErrorKind::config, "learning_rate must be positive");
  }
  if (max_iterations < 1) fail(ErrorKind::config, "max_iterations must be at least 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    fail(ErrorKind::config, "Adam betas must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) fail(ErrorKind::config, "Adam epsilon must be positive");
}

AdamState AdamState::zeros_like(const AutoencoderModel& model) {
  AdamState s;
  for (std::size_t l = 0; l < model.layers(); ++l) {
    s.m_weights.push_back(Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols()));
    s.v_weights.push_back(s.m_weights.back());
    s.m_biases.push_back(Eigen::VectorXd::Zero(model.biases[l].size()));
    s.v_biases.push_back(s.m_biases.back());
  }
  return s;
}

void adam_step(AutoencoderModel& model, const Gradients& grads, AdamState& state,
               const TrainConfig& cfg) {
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t l = 0; l < model.layers(); ++l) {
    auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
      m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
      v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseAbs2();
      param.array() -=
          cfg.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.epsilon);
    };
    update(model.weights[l], grads.weights[l], state.m_weights[l], state.v_weights[l]);
    update(model.biases[l], grads.biases[l], state.m_biases[l], state.v_biases[l]);
  }
}

std::optional<int> TrainingTrace::iterations_to_within(double factor) const {
  if (losses.empty()) return std::nullopt;
  const double target = factor * losses.back();
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (losses[i] <= target) return static_cast<int>(i + 1);
  }
  return std::nullopt;
}

TrainResult train(AutoencoderModel model, const Eigen::Ref<const Eigen::MatrixXd>& x,
                  const TrainConfig& cfg) {
  cfg.validate();
  model.validate();
  if (x.cols() < 1) fail(ErrorKind::dimension, "training needs at least one sample");
  TrainResult result;
  result.trace.losses.reserve(static_cast<std::size_t>(cfg.max_iterations));
  AdamState state = AdamState::zeros_like(model);
  Gradients grads;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    const double loss = loss_and_gradients(model, x, &grads);
    if (!std::isfinite(loss)) {
      fail(ErrorKind::divergence, "training loss is not finite at iteration " + std::to_string(it));
    }
    result.trace.losses.push_back(loss);
    adam_step(model, grads, state, cfg);
  }
  result.trace.iterations_to_tolerance = result.trace.iterations_to_within(1.1);
  result.model = std::move(model);
  return result;
}

double rmse_indicator(const AutoencoderModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::VectorXd e = x - forward(model, x).reconstruction;
  return std::sqrt(e.squaredNorm() / static_cast<double>(e.size()));
}

Eigen::VectorXd rmse_batch(const AutoencoderModel& model, const Eigen::Ref<const Eigen::MatrixXd>& x) {
  const auto acts = forward_batch(model, x);
  const Eigen::MatrixXd e = x - acts.back();
  return (e.colwise().squaredNorm() / static_cast<double>(x.rows())).cwiseSqrt().transpose();
}

MinMaxScaler MinMaxScaler::fit(const Eigen::Ref<const Eigen::MatrixXd>& x) {
  if (x.cols() < 1) fail(ErrorKind::dimension, "scaler needs at least one sample");
  return {x.rowwise().minCoeff(), x.rowwise().maxCoeff()};
}

Eigen::MatrixXd MinMaxScaler::transform(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
  if (x.rows() != lo.size()) fail(ErrorKind::dimension, "scaler dimension mismatch");
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (long i = 0; i < x.rows(); ++i) {
    const double range = hi(i) - lo(i);
    if (range > 0.0) out.row(i) = (x.row(i).array() - lo(i)) / range;
    else out.row(i).setConstant(0.5);
  }
  return out;
}

std::vector<int> MinMaxScaler::constant_coordinates() const {
  std::vector<int> out;
  for (long i = 0; i < lo.size(); ++i) {
    if (!(hi(i) - lo(i) > 0.0)) out.push_back(static_cast<int>(i));
  }
  return out;
}

SaeReport run_sae(const SpatioTemporalMatrix& d, const SaeConfig& cfg) {
  check_span(d, cfg);
  cfg.train.validate();
  const Eigen::MatrixXd x = features(d, cfg);
  const long begin = cfg.train_begin - d.t0();
  const long width = cfg.train_end - cfg.train_begin + 1;

  SaeReport report;
  report.scaler = MinMaxScaler::fit(x.middleCols(begin, width));
  const Eigen::MatrixXd scaled = report.scaler.transform(x);

  std::vector<int> sizes{static_cast<int>(x.rows())};
  sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  sizes.push_back(static_cast<int>(x.rows()));
  TrainResult trained =
      train(init_model(sizes, cfg.train.seed), scaled.middleCols(begin, width), cfg.train);
  report.model = std::move(trained.model);
  report.trace = std::move(trained.trace);
  return score(scaled, d, cfg, std::move(report));
}

SaeReport score_sae(const SpatioTemporalMatrix& d, const SaeConfig& cfg,
                    const AutoencoderModel& model, const MinMaxScaler& scaler) {
  check_span(d, cfg);
  model.validate();
  const Eigen::MatrixXd x = features(d, cfg);
  if (x.rows() != model.input_dim() || scaler.lo.size() != x.rows()) {
    fail(ErrorKind::dimension, "checkpoint dimension does not match the data");
  }
  SaeReport report;
  report.model = model;
  report.scaler = scaler;
  return score(scaler.transform(x), d, cfg, std::move(report));
}

}  // namespace dimlift
