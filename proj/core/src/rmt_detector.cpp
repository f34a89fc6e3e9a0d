#include "dimlift/rmt_detector.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dimlift/error.hpp"
#include "dimlift/random.hpp"

namespace dimlift {

namespace {

double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<long>(mid));
  return 0.5 * (lo + hi);
}

[[noreturn]] void rethrow_at(const Error& e, long t) {
  std::ostringstream msg;
  msg << "window ending at t=" << t << ": " << e.what();
  throw Error(e.kind(), msg.str());
}

void collect_alarms(const IndicatorSeries& series, const std::vector<double>& sigmas,
                    double threshold, std::vector<Alarm>& out) {
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    if (sigmas[i] >= threshold) out.push_back({series.time_at(i), series.kind, sigmas[i]});
  }
}

}  // namespace

CovarianceSpec RmtDetectorConfig::covariance() const {
  if (weights.empty()) return CovarianceSpec::uniform(window.width);
  if (static_cast<int>(weights.size()) != window.width) {
    fail(ErrorKind::config, "covariance weights must have one entry per window column");
  }
  return CovarianceSpec{weights};
}

Eigen::Ref<const Eigen::MatrixXd> window_at(const LiftedMatrix& lifted, long t, int width) {
  if (width < 1) fail(ErrorKind::config, "window width must be positive");
  const long first = t - width + 1;
  if (first < lifted.t0() || t > lifted.t0() + lifted.samples() - 1) {
    std::ostringstream msg;
    msg << "window of width " << width << " ending at t=" << t
        << " does not fit samples " << lifted.t0() << ".."
        << lifted.t0() + lifted.samples() - 1;
    fail(ErrorKind::window, msg.str());
  }
  return lifted.values().middleCols(first - lifted.t0(), width);
}

Baseline robust_baseline(std::span<const double> values, int span) {
  if (span < 1 || static_cast<std::size_t>(span) > values.size()) {
    std::ostringstream msg;
    msg << "baseline span " << span << " does not fit a curve of " << values.size() << " points";
    fail(ErrorKind::config, msg.str());
  }
  std::vector<double> head(values.begin(), values.begin() + span);
  Baseline b;
  b.median = median_of(head);
  for (double& v : head) v = std::abs(v - b.median);
  b.sigma = 1.4826 * median_of(head);
  return b;
}

std::vector<double> deviation_sigmas(std::span<const double> values, const Baseline& base) {
  // A flat baseline would make every later wiggle infinitely significant;
  // the floor keeps the ratio finite and serializable.
  const double sigma =
      std::max({base.sigma, 1e-12 * std::abs(base.median), std::numeric_limits<double>::min()});
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = std::abs(values[i] - base.median) / sigma;
  }
  return out;
}

DetectionReport run_rmt(const SpatioTemporalMatrix& d, const RmtDetectorConfig& cfg) {
  cfg.lift.validate(d.channels());
  const SpatioTemporalMatrix input = cfg.use_residual ? residual_matrix(d) : d;
  cfg.window.validate(input.samples());
  const CovarianceSpec weights = cfg.covariance();

  const LiftedMatrix lifted = lift_matrix(input, cfg.lift, ScaleMode::unit_norm);
  const double sqrt_dim = std::sqrt(static_cast<double>(lifted.dim()));
  const int width = cfg.window.width;
  const int stride = cfg.window.stride;
  const long t_first = input.t0() + width - 1;
  const long t_last = input.t_end();

  DetectionReport report;
  report.les_raw = {t_first, stride, IndicatorKind::les, {}, std::nullopt};
  report.msr_raw = {t_first, stride, IndicatorKind::msr, {}, std::nullopt};

  for (long t = t_first; t <= t_last; t += stride) {
    const std::uint64_t window_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(t));
    try {
      const auto x = window_at(lifted, t, width);
      const auto eigs = covariance_eigenvalues(tensor_covariance(x, weights));
      report.les_raw.values.push_back(les(eigs, cfg.test_function));
      if (cfg.compute_msr) {
        const auto ring =
            ring_eigenvalues(singular_value_equivalent(row_standardize(x), window_seed));
        report.msr_raw.values.push_back(msr(ring));
      }
      if (std::find(cfg.snapshot_at.begin(), cfg.snapshot_at.end(), t) != cfg.snapshot_at.end()) {
        const Eigen::MatrixXd scaled = x * sqrt_dim;
        report.spectral_snapshots.emplace(t, summarize_window(scaled, weights, window_seed));
      }
    } catch (const Error& e) {
      rethrow_at(e, t);
    }
  }
  for (long t : cfg.snapshot_at) {
    if (!report.spectral_snapshots.contains(t)) {
      std::ostringstream msg;
      msg << "snapshot at t=" << t << " is not an evaluated window (curve covers " << t_first
          << ".." << t_last << " with stride " << stride << ")";
      fail(ErrorKind::window, msg.str());
    }
  }

  report.les_curve = normalize_curve(report.les_raw);
  if (cfg.compute_msr) report.msr_curve = normalize_curve(report.msr_raw);
  else report.msr_curve = report.msr_raw;

  if (cfg.deviation.enabled) {
    report.les_baseline = robust_baseline(report.les_raw.values, cfg.deviation.baseline_span);
    report.les_sigmas = deviation_sigmas(report.les_raw.values, report.les_baseline);
    collect_alarms(report.les_raw, report.les_sigmas, cfg.deviation.threshold_sigmas,
                   report.alarms);
    if (cfg.compute_msr) {
      report.msr_baseline = robust_baseline(report.msr_raw.values, cfg.deviation.baseline_span);
      report.msr_sigmas = deviation_sigmas(report.msr_raw.values, report.msr_baseline);
      collect_alarms(report.msr_raw, report.msr_sigmas, cfg.deviation.threshold_sigmas,
                     report.alarms);
    }
    std::stable_sort(report.alarms.begin(), report.alarms.end(),
                     [](const Alarm& a, const Alarm& b) { return a.t < b.t; });
  }
  return report;
}

}  // namespace dimlift
