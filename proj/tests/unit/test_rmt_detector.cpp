#include <gtest/gtest.h>

#include "dimlift/error.hpp"
#include "dimlift/rmt_detector.hpp"
#include "oracles.hpp"

using namespace dimlift;

namespace {

SpatioTemporalMatrix white(int p, int n, std::uint64_t seed, double level = 1.0, double sd = 0.01) {
  return SpatioTemporalMatrix((sd * oracle::gaussian_matrix(p, n, seed)).array() + level);
}

RmtDetectorConfig small_config() {
  RmtDetectorConfig c;
  c.lift = LiftConfig{2, 4};
  c.window = {60, 1};
  c.deviation.baseline_span = 100;
  return c;
}

}  // namespace

TEST(WindowAt, IndexArithmetic) {
  Eigen::MatrixXd v(2, 1000);
  for (long j = 0; j < 1000; ++j) v.col(j).setConstant(static_cast<double>(j + 1));
  const LiftedMatrix lifted(v, LiftConfig{1, 2}, ScaleMode::unit_norm, 1);
  const auto x = window_at(lifted, 200, 200);
  EXPECT_EQ(x.cols(), 200);
  EXPECT_EQ(x(0, 0), 1.0);
  EXPECT_EQ(x(0, 199), 200.0);
  EXPECT_EQ(window_at(lifted, 1000, 200)(1, 0), 801.0);
  try {
    window_at(lifted, 150, 200);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::window);
  }
}

TEST(RobustBaseline, MedianAndMad) {
  const std::vector<double> v{1, 2, 3, 4, 100, 7};
  const Baseline b = robust_baseline(v, 5);
  EXPECT_EQ(b.median, 3.0);
  EXPECT_DOUBLE_EQ(b.sigma, 1.4826 * 1.0);
  const auto s = deviation_sigmas(v, b);
  EXPECT_DOUBLE_EQ(s[5], 4.0 / 1.4826);
  const Baseline even = robust_baseline(v, 4);
  EXPECT_EQ(even.median, 2.5);
  EXPECT_THROW(robust_baseline(v, 7), Error);
}

TEST(RunRmt, CurveLengthAndStart) {
  RmtDetectorConfig c = small_config();
  c.window.stride = 3;
  const auto r = run_rmt(white(8, 400, 1), c);
  // residual: 399 samples starting at t=2; first window ends at 2 + 59.
  EXPECT_EQ(r.les_raw.start_index, 61);
  EXPECT_EQ(r.les_raw.size(), static_cast<std::size_t>((399 - 60) / 3 + 1));
  EXPECT_EQ(r.msr_raw.size(), r.les_raw.size());
  EXPECT_EQ(r.les_raw.time_at(1), 64);

  c.use_residual = false;
  c.window.stride = 1;
  const auto raw = run_rmt(white(8, 400, 1), c);
  EXPECT_EQ(raw.les_raw.start_index, 60);
  EXPECT_EQ(raw.les_raw.size(), 341u);
}

TEST(RunRmt, NormalizedCurvesInUnitInterval) {
  const auto r = run_rmt(white(8, 300, 2), small_config());
  for (const auto* s : {&r.les_curve, &r.msr_curve}) {
    ASSERT_TRUE(s->normalization_max.has_value());
    double top = 0.0;
    for (double v : s->values) {
      EXPECT_GT(v, 0.0);
      EXPECT_LE(v, 1.0);
      top = std::max(top, v);
    }
    EXPECT_EQ(top, 1.0);
  }
}

TEST(RunRmt, Deterministic) {
  RmtDetectorConfig c = small_config();
  c.seed = 42;
  c.snapshot_at = {150};
  const auto d = white(8, 300, 3);
  const auto a = run_rmt(d, c);
  const auto b = run_rmt(d, c);
  EXPECT_EQ(a.les_raw.values, b.les_raw.values);
  EXPECT_EQ(a.msr_raw.values, b.msr_raw.values);
  EXPECT_EQ(a.alarms.size(), b.alarms.size());
  EXPECT_EQ(a.spectral_snapshots.at(150).ring_eigs, b.spectral_snapshots.at(150).ring_eigs);
  c.seed = 43;
  EXPECT_NE(run_rmt(d, c).msr_raw.values, a.msr_raw.values);
}

TEST(RunRmt, SnapshotMustBeEvaluated) {
  RmtDetectorConfig c = small_config();
  c.snapshot_at = {10};
  try {
    run_rmt(white(8, 300, 3), c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::window);
  }
}

TEST(RunRmt, SnapshotUsesSqrtDimScale) {
  RmtDetectorConfig c = small_config();
  c.snapshot_at = {200};
  const auto r = run_rmt(white(8, 300, 4), c);
  const auto& s = r.spectral_snapshots.at(200);
  EXPECT_EQ(s.dim, 16);
  double sum = 0.0;
  for (double e : s.covariance_eigs) sum += e;
  EXPECT_NEAR(sum, 16.0, 1e-10);
}

TEST(RunRmt, TooFewSamples) {
  RmtDetectorConfig c = small_config();
  c.window.width = 300;
  try {
    run_rmt(white(8, 300, 5), c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::window);
  }
}

TEST(RunRmt, StationaryNoiseRarelyDeviates) {
  // Pooled over 20 seeds, at most 2% of points sit 3 baseline sigmas out.
  RmtDetectorConfig c;
  c.lift = LiftConfig{2, 4};
  long total = 0;
  long beyond = 0;
  long alarms = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    c.seed = seed;
    const auto r = run_rmt(white(8, 1000, 100 + seed), c);
    for (const auto* s : {&r.les_sigmas, &r.msr_sigmas}) {
      for (double v : *s) {
        ++total;
        beyond += v >= 3.0 ? 1 : 0;
      }
    }
    alarms += static_cast<long>(r.alarms.size());
  }
  EXPECT_LE(static_cast<double>(beyond) / static_cast<double>(total), 0.02)
      << beyond << " of " << total << " points, " << alarms << " alarms";
}

TEST(RunRmt, RawStepIsFlaggedAtOnset) {
  Eigen::MatrixXd v = (0.01 * oracle::gaussian_matrix(8, 500, 9)).array() + 1.0;
  v.block(1, 300, 1, 200).array() += 0.2;
  v.block(6, 300, 1, 200).array() += 0.2;
  RmtDetectorConfig c = small_config();
  c.use_residual = false;
  const auto r = run_rmt(SpatioTemporalMatrix(v), c);
  ASSERT_FALSE(r.alarms.empty());
  EXPECT_EQ(r.alarms.front().t, 301);
}
