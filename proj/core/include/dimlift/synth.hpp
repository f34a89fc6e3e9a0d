#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "dimlift/data_model.hpp"

namespace dimlift {

enum class AnomalyKind { step, ramp };

/// Signal-level anomaly on a subset of channels. Channel numbers are
/// 1-based; times are 1-based sample indices.
///  step: +magnitude for onset <= t <= end.
///  ramp: magnitude * (t - onset) / (end - onset) on [onset, end], held after end.
struct AnomalySpec {
  AnomalyKind kind = AnomalyKind::step;
  long onset = 501;
  std::optional<long> end;  // defaults to the last sample
  std::vector<int> channels;
  double magnitude = 0.0;

  double contribution(long t, long samples) const noexcept;
};

/// AR(1) measurement noise E_t = b E_{t-1} + eps_t, eps_t ~ N(0, 1 - b^2).
struct NoiseConfig {
  bool enabled = true;
  double b = 0.5;
  double snr = 1000.0;
};

struct ScenarioConfig {
  int channels = 28;
  int samples = 1000;
  std::vector<double> baselines;  // empty = 1.0 for every channel
  double white_sigma = 1e-3;
  std::vector<AnomalySpec> anomalies;
  NoiseConfig noise;
  std::uint64_t seed = 0;

  void validate() const;
};

/// P x N AR(1) chains, each started from N(0, 1). Row i uses its own
/// derived seed, so rows do not depend on each other.
Eigen::MatrixXd colored_noise(int channels, int samples, double b, std::uint64_t seed);

/// m = sqrt(var(D) / (var(E) * snr)), population variances over all entries.
/// A constant D has no meaningful SNR; the result is 0 and a warning is printed.
double snr_scale(const Eigen::Ref<const Eigen::MatrixXd>& d,
                 const Eigen::Ref<const Eigen::MatrixXd>& e, double snr);

/// baseline + white fluctuation + anomalies + m * E.
SpatioTemporalMatrix generate(const ScenarioConfig& cfg);

}  // namespace dimlift
