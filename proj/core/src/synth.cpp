#include "dimlift/synth.hpp"

#include <cmath>
#include <iostream>
#include <random>
#include <sstream>

#include "dimlift/error.hpp"
#include "dimlift/random.hpp"

namespace dimlift {

namespace {

// Stream tags for derive_seed.
constexpr std::uint64_t kWhiteStream = 1;
constexpr std::uint64_t kColoredStream = 2;

double population_variance(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  const double mean = m.mean();
  return (m.array() - mean).square().mean();
}

}  // namespace

double AnomalySpec::contribution(long t, long samples) const noexcept {
  const long last = end.value_or(samples);
  if (t < onset) return 0.0;
  switch (kind) {
    case AnomalyKind::step:
      return t <= last ? magnitude : 0.0;
    case AnomalyKind::ramp: {
      const long clipped = std::min(t, last);
      return magnitude * static_cast<double>(clipped - onset) / static_cast<double>(last - onset);
    }
  }
  return 0.0;
}

void ScenarioConfig::validate() const {
  if (channels < 1) fail(ErrorKind::config, "scenario needs at least one channel");
  if (samples < 1) fail(ErrorKind::config, "scenario needs at least one sample");
  if (!baselines.empty() && static_cast<int>(baselines.size()) != channels) {
    fail(ErrorKind::config, "baselines must list one level per channel");
  }
  for (double b : baselines) {
    if (!std::isfinite(b)) fail(ErrorKind::config, "non-finite baseline level");
  }
  if (!(white_sigma >= 0.0) || !std::isfinite(white_sigma)) {
    fail(ErrorKind::config, "white_sigma must be finite and non-negative");
  }
  for (std::size_t a = 0; a < anomalies.size(); ++a) {
    const AnomalySpec& an = anomalies[a];
    const long last = an.end.value_or(samples);
    std::ostringstream where;
    where << "anomaly " << a + 1 << ": ";
    if (an.onset < 1 || last > samples || an.onset >= last) {
      fail(ErrorKind::config, where.str() + "span must satisfy 1 <= onset < end <= samples");
    }
    if (an.channels.empty()) fail(ErrorKind::config, where.str() + "no channels");
    for (int c : an.channels) {
      if (c < 1 || c > channels) {
        fail(ErrorKind::config, where.str() + "channel " + std::to_string(c) + " out of range");
      }
    }
    if (!std::isfinite(an.magnitude)) fail(ErrorKind::config, where.str() + "non-finite magnitude");
  }
  if (noise.enabled) {
    if (!(std::abs(noise.b) < 1.0)) fail(ErrorKind::config, "noise b must lie in (-1, 1)");
    if (!(noise.snr > 0.0) || !std::isfinite(noise.snr)) {
      fail(ErrorKind::config, "noise snr must be positive");
    }
  }
}

Eigen::MatrixXd colored_noise(int channels, int samples, double b, std::uint64_t seed) {
  if (!(std::abs(b) < 1.0)) fail(ErrorKind::parameter, "AR(1) coefficient must satisfy |b| < 1");
  if (channels < 1 || samples < 1) fail(ErrorKind::dimension, "noise matrix must be non-empty");
  const double innovation = std::sqrt(1.0 - b * b);
  Eigen::MatrixXd e(channels, samples);
  for (int i = 0; i < channels; ++i) {
    Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    std::normal_distribution<double> gauss(0.0, 1.0);
    e(i, 0) = gauss(rng);
    for (int j = 1; j < samples; ++j) e(i, j) = b * e(i, j - 1) + innovation * gauss(rng);
  }
  return e;
}

double snr_scale(const Eigen::Ref<const Eigen::MatrixXd>& d,
                 const Eigen::Ref<const Eigen::MatrixXd>& e, double snr) {
  if (!(snr > 0.0)) fail(ErrorKind::parameter, "snr must be positive");
  const double var_e = population_variance(e);
  if (!(var_e > 0.0)) fail(ErrorKind::parameter, "noise matrix has zero variance");
  const double var_d = population_variance(d);
  if (var_d == 0.0) {
    std::cerr << "warning: signal has zero variance; colored noise scale set to 0\n";
    return 0.0;
  }
  return std::sqrt(var_d / (var_e * snr));
}

SpatioTemporalMatrix generate(const ScenarioConfig& cfg) {
  cfg.validate();
  const int p = cfg.channels;
  const int n = cfg.samples;
  Eigen::MatrixXd d(p, n);
  for (int i = 0; i < p; ++i) {
    const double level = cfg.baselines.empty() ? 1.0 : cfg.baselines[static_cast<std::size_t>(i)];
    d.row(i).setConstant(level);
  }
  if (cfg.white_sigma > 0.0) {
    for (int i = 0; i < p; ++i) {
      Rng rng = make_rng(derive_seed(cfg.seed, kWhiteStream, static_cast<std::uint64_t>(i)));
      std::normal_distribution<double> gauss(0.0, cfg.white_sigma);
      for (int j = 0; j < n; ++j) d(i, j) += gauss(rng);
    }
  }
  for (const AnomalySpec& an : cfg.anomalies) {
    for (int c : an.channels) {
      for (int j = 0; j < n; ++j) d(c - 1, j) += an.contribution(j + 1, n);
    }
  }
  if (cfg.noise.enabled) {
    const Eigen::MatrixXd e =
        colored_noise(p, n, cfg.noise.b, derive_seed(cfg.seed, kColoredStream));
    const double m = snr_scale(d, e, cfg.noise.snr);
    d += m * e;
  }
  return SpatioTemporalMatrix(std::move(d));
}

}  // namespace dimlift
