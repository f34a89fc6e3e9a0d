#include <cmath>

#include <gtest/gtest.h>

#include "dimlift/autoencoder.hpp"
#include "dimlift/error.hpp"
#include "dimlift/synth.hpp"
#include "oracles.hpp"

using namespace dimlift;

namespace {

Eigen::MatrixXd unit_interval(long rows, long cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd x(rows, cols);
  for (long j = 0; j < cols; ++j)
    for (long i = 0; i < rows; ++i) x(i, j) = u(rng);
  return x;
}

}  // namespace

TEST(InitModel, Shapes) {
  const auto m = init_model(28, 1);
  ASSERT_EQ(m.layers(), 4u);
  const std::pair<long, long> shapes[] = {{28, 48}, {48, 24}, {24, 48}, {48, 28}};
  for (std::size_t l = 0; l < 4; ++l) {
    EXPECT_EQ(m.weights[l].rows(), shapes[l].first);
    EXPECT_EQ(m.weights[l].cols(), shapes[l].second);
    EXPECT_TRUE(m.biases[l].isZero(0.0));
  }
  EXPECT_EQ(init_model(196, 1).weights[0].rows(), 196);
  EXPECT_EQ(init_model(196, 1).weights[0].cols(), 48);
}

TEST(InitModel, GlorotBoundsAndDeterminism) {
  const auto a = init_model(28, 9);
  const auto b = init_model(28, 9);
  for (std::size_t l = 0; l < a.layers(); ++l) {
    EXPECT_EQ(a.weights[l], b.weights[l]);
    const double limit = std::sqrt(6.0 / (a.weights[l].rows() + a.weights[l].cols()));
    EXPECT_LE(a.weights[l].cwiseAbs().maxCoeff(), limit);
    EXPECT_GT(a.weights[l].cwiseAbs().maxCoeff(), 0.8 * limit);
  }
  EXPECT_NE(init_model(28, 10).weights[0], a.weights[0]);
}

TEST(Forward, ZeroParametersGiveOneHalf) {
  auto m = init_model(5, 1);
  for (auto& w : m.weights) w.setZero();
  const auto r = forward(m, Eigen::VectorXd::Constant(5, 0.3));
  EXPECT_TRUE(r.reconstruction.isApprox(Eigen::VectorXd::Constant(5, 0.5)));
  for (const auto& a : r.activations) EXPECT_EQ(a.rows() > 0, true);
  EXPECT_EQ(r.activations.size(), 5u);
}

TEST(Forward, OutputsInOpenUnitInterval) {
  const auto m = init_model(12, 3);
  const auto r = forward(m, unit_interval(12, 1, 4).col(0));
  EXPECT_GT(r.reconstruction.minCoeff(), 0.0);
  EXPECT_LT(r.reconstruction.maxCoeff(), 1.0);
  EXPECT_EQ(forward(m, unit_interval(12, 1, 4).col(0)).reconstruction, r.reconstruction);
}

TEST(Forward, DimensionMismatch) {
  try {
    forward(init_model(6, 1), Eigen::VectorXd::Zero(5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::dimension);
  }
}

TEST(Gradients, MatchCentralDifferences) {
  auto m = init_model({6, 4, 2, 4, 6}, 17);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 0.3);
  for (auto& b : m.biases)
    for (auto& x : b) x = g(rng);
  const Eigen::MatrixXd x = unit_interval(6, 9, 5);
  Gradients grads;
  loss_and_gradients(m, x, &grads);

  const double h = 1e-5;
  double worst = 0.0;
  auto check = [&](double& param, double analytic) {
    const double keep = param;
    param = keep + h;
    const double up = loss_and_gradients(m, x, nullptr);
    param = keep - h;
    const double down = loss_and_gradients(m, x, nullptr);
    param = keep;
    const double numeric = (up - down) / (2.0 * h);
    const double rel = std::abs(numeric - analytic) / std::max(std::abs(numeric) + std::abs(analytic), 1e-7);
    worst = std::max(worst, rel);
  };
  for (std::size_t l = 0; l < m.layers(); ++l) {
    for (long i = 0; i < m.weights[l].size(); ++i) check(m.weights[l].data()[i], grads.weights[l].data()[i]);
    for (long i = 0; i < m.biases[l].size(); ++i) check(m.biases[l](i), grads.biases[l](i));
  }
  EXPECT_LE(worst, 1e-5);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  auto m = init_model({6, 4, 2, 4, 6}, 2);
  const auto before = m;
  Gradients zero;
  for (std::size_t l = 0; l < m.layers(); ++l) {
    zero.weights.push_back(Eigen::MatrixXd::Zero(m.weights[l].rows(), m.weights[l].cols()));
    zero.biases.push_back(Eigen::VectorXd::Zero(m.biases[l].size()));
  }
  AdamState state = AdamState::zeros_like(m);
  adam_step(m, zero, state, TrainConfig{});
  for (std::size_t l = 0; l < m.layers(); ++l) {
    EXPECT_EQ(m.weights[l], before.weights[l]);
    EXPECT_EQ(m.biases[l], before.biases[l]);
  }
}

TEST(Adam, FirstStepMovesByLearningRate) {
  auto m = init_model({3, 2, 3}, 2);
  const auto before = m;
  Gradients grads;
  loss_and_gradients(m, unit_interval(3, 4, 1), &grads);
  AdamState state = AdamState::zeros_like(m);
  TrainConfig cfg;
  adam_step(m, grads, state, cfg);
  // Bias-corrected first step is lr * g / (|g| + eps).
  const double g = grads.weights[0](0, 0);
  EXPECT_NEAR(m.weights[0](0, 0) - before.weights[0](0, 0), -cfg.learning_rate * g / (std::abs(g) + 1e-8), 1e-15);
}

TEST(Train, MemorizesOnePoint) {
  Eigen::VectorXd v = unit_interval(10, 1, 8).col(0);
  const Eigen::MatrixXd x = v.replicate(1, 50);
  const auto r = train(init_model(10, 1), x, TrainConfig{});
  EXPECT_EQ(r.trace.losses.size(), 1000u);
  EXPECT_LT(r.trace.losses.back(), 1e-3);
  EXPECT_LT(r.trace.losses.back(), r.trace.losses.front());
}

TEST(Train, DeterministicAndTraceLength) {
  const Eigen::MatrixXd x = unit_interval(8, 30, 2);
  TrainConfig cfg;
  cfg.max_iterations = 200;
  const auto a = train(init_model(8, 3), x, cfg);
  const auto b = train(init_model(8, 3), x, cfg);
  EXPECT_EQ(a.trace.losses, b.trace.losses);
  EXPECT_EQ(a.trace.losses.size(), 200u);
  for (std::size_t l = 0; l < a.model.layers(); ++l) EXPECT_EQ(a.model.weights[l], b.model.weights[l]);
}

TEST(Train, NonFiniteLossIsDivergence) {
  Eigen::MatrixXd x = unit_interval(4, 5, 2);
  x(1, 1) = std::nan("");
  try {
    train(init_model(4, 1), x, TrainConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::divergence);
    EXPECT_NE(std::string(e.what()).find("iteration 1"), std::string::npos);
  }
}

TEST(TrainingTrace, IterationsToTolerance) {
  TrainingTrace t{{10.0, 5.0, 1.2, 1.05, 1.0}, std::nullopt};
  EXPECT_EQ(t.iterations_to_within(1.1), 4);
  EXPECT_EQ(t.iterations_to_within(1.25), 3);
}

TEST(Rmse, Examples) {
  auto m = init_model(2, 1);
  for (auto& w : m.weights) w.setZero();
  // Output is (0.5, 0.5): error (3, 4) at x = (3.5, 4.5).
  EXPECT_NEAR(rmse_indicator(m, Eigen::Vector2d(3.5, 4.5)), std::sqrt(12.5), 1e-15);
  EXPECT_EQ(rmse_indicator(m, Eigen::Vector2d(0.5, 0.5)), 0.0);
  EXPECT_NEAR(rmse_indicator(m, Eigen::Vector2d(0.25, 0.25)), 0.25, 1e-15);
}

TEST(Rmse, MatchesBruteForce) {
  const auto m = init_model(7, 4);
  const Eigen::MatrixXd x = unit_interval(7, 20, 6);
  const Eigen::VectorXd batch = rmse_batch(m, x);
  for (long j = 0; j < x.cols(); ++j) {
    const double brute = oracle::brute_rmse(x.col(j), forward(m, x.col(j)).reconstruction);
    EXPECT_NEAR(rmse_indicator(m, x.col(j)), brute, 1e-12);
    EXPECT_NEAR(batch(j), brute, 1e-12);
  }
}

TEST(MinMaxScaler, TrainingSpanOnly) {
  Eigen::MatrixXd v = unit_interval(3, 300, 1);
  v(0, 250) = 50.0;
  v.row(2).head(200).setConstant(0.4);
  SaeConfig cfg;
  cfg.lift.reset();
  cfg.train.max_iterations = 5;
  const auto r = run_sae(SpatioTemporalMatrix(v), cfg);
  EXPECT_EQ(r.scaler.lo, v.leftCols(200).rowwise().minCoeff());
  EXPECT_EQ(r.scaler.hi, v.leftCols(200).rowwise().maxCoeff());
  EXPECT_EQ(r.constant_coordinates, std::vector<int>{2});
  const Eigen::MatrixXd scaled = r.scaler.transform(v);
  EXPECT_TRUE((scaled.row(2).array() == 0.5).all());
  EXPECT_EQ(r.rmse_raw.start_index, 201);
  EXPECT_EQ(r.rmse_raw.size(), 100u);
}

TEST(RunSae, StationaryDataHasNoSpikes) {
  // No scored sample exceeds 5x the median RMSE, for any of 20 seeds.
  ScenarioConfig sc;
  sc.samples = 600;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    sc.seed = seed;
    SaeConfig cfg;
    cfg.lift.reset();
    cfg.train.seed = seed;
    const auto r = run_sae(generate(sc), cfg);
    std::vector<double> v = r.rmse_raw.values;
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    const double median = v[v.size() / 2];
    worst = std::max(worst, *std::max_element(r.rmse_raw.values.begin(), r.rmse_raw.values.end()) / median);
  }
  EXPECT_LT(worst, 5.0);
}

TEST(RunSae, CheckpointScoringReproducesCurve) {
  ScenarioConfig sc;
  sc.samples = 400;
  sc.anomalies.push_back({AnomalyKind::step, 301, std::nullopt, {3, 17}, 0.05});
  const auto d = generate(sc);
  SaeConfig cfg;
  cfg.lift = LiftConfig{2, 14};
  cfg.train.max_iterations = 50;
  const auto r = run_sae(d, cfg);
  const auto again = score_sae(d, cfg, r.model, r.scaler);
  EXPECT_EQ(again.rmse_raw.values, r.rmse_raw.values);
  EXPECT_EQ(r.model.input_dim(), 196);
}

TEST(RunSae, SpanOutsideData) {
  SaeConfig cfg;
  cfg.train_end = 1000;
  try {
    run_sae(SpatioTemporalMatrix(unit_interval(4, 500, 1)), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::window);
  }
}
