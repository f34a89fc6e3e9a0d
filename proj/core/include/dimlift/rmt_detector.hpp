#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "dimlift/data_model.hpp"
#include "dimlift/indicators.hpp"
#include "dimlift/lift.hpp"
#include "dimlift/spectral.hpp"

namespace dimlift {

/// Robust alarm rule: median and 1.4826 * MAD over the first baseline_span
/// points of a curve; a point alarms when |v - median| >= threshold * sigma.
struct DeviationRule {
  bool enabled = true;
  int baseline_span = 200;
  double threshold_sigmas = 5.0;
};

struct RmtDetectorConfig {
  LiftConfig lift;
  WindowSpec window;
  std::vector<double> weights;  // empty = 1/N' for every column
  TestFunction test_function = TestFunction::entropy();
  bool use_residual = true;
  bool compute_msr = true;
  std::uint64_t seed = 0;
  DeviationRule deviation;
  std::vector<long> snapshot_at;  // sample indices that keep a SpectralSummary

  CovarianceSpec covariance() const;
};

struct Baseline {
  double median = 0.0;
  double sigma = 0.0;
};

struct Alarm {
  long t = 0;
  IndicatorKind indicator = IndicatorKind::les;
  double deviation_sigmas = 0.0;
};

struct DetectionReport {
  IndicatorSeries les_raw;
  IndicatorSeries les_curve;  // normalized into (0, 1]
  IndicatorSeries msr_raw;    // empty when MSR is disabled
  IndicatorSeries msr_curve;
  Baseline les_baseline;
  Baseline msr_baseline;
  std::vector<double> les_sigmas;  // |v - median| / sigma per point
  std::vector<double> msr_sigmas;
  std::vector<Alarm> alarms;       // ordered by t, LES before MSR at equal t
  std::map<long, SpectralSummary> spectral_snapshots;
};

/// The width most recent lifted columns ending at sample t.
Eigen::Ref<const Eigen::MatrixXd> window_at(const LiftedMatrix& lifted, long t, int width);

Baseline robust_baseline(std::span<const double> values, int span);

/// Deviation of every point from the baseline, in baseline sigmas.
std::vector<double> deviation_sigmas(std::span<const double> values, const Baseline& base);

/// LES is evaluated on the unit-norm lift, where the window covariance has
/// trace 1 and the entropy is the von Neumann entropy of the window. Snapshots
/// report the sqrt_dim scale that the Marchenko-Pastur comparison expects.
DetectionReport run_rmt(const SpatioTemporalMatrix& d, const RmtDetectorConfig& cfg);

}  // namespace dimlift
