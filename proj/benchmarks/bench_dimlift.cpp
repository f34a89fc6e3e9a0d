#include <random>

#include <benchmark/benchmark.h>

#include "dimlift/autoencoder.hpp"
#include "dimlift/lift.hpp"
#include "dimlift/spectral.hpp"

using namespace dimlift;

namespace {

Eigen::MatrixXd gaussian(long rows, long cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(rows, cols);
  for (long i = 0; i < x.size(); ++i) x.data()[i] = 1.0 + 1e-3 * g(rng);
  return x;
}

// Lifting 28 channels (k = 2, n = 14) over N samples.
void BM_Lift(benchmark::State& state) {
  const SpatioTemporalMatrix d(gaussian(28, state.range(0), 1));
  for (auto _ : state) benchmark::DoNotOptimize(lift_matrix(d, LiftConfig{2, 14}, ScaleMode::unit_norm));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Lift)->Arg(200)->Arg(1000);

// Covariance plus eigenvalues of one n^k x 200 window.
void BM_CovarianceEigen(benchmark::State& state) {
  const long dim = state.range(0);
  const Eigen::MatrixXd w = gaussian(dim, 200, 2);
  const auto spec = CovarianceSpec::uniform(200);
  for (auto _ : state) benchmark::DoNotOptimize(covariance_eigenvalues(tensor_covariance(w, spec)));
}
BENCHMARK(BM_CovarianceEigen)->Arg(28)->Arg(196)->Unit(benchmark::kMillisecond);

// Singular value equivalent and its complex eigenvalues for one window.
void BM_RingWindow(benchmark::State& state) {
  const long dim = state.range(0);
  const Eigen::MatrixXd w = gaussian(dim, 200, 3);
  for (auto _ : state) benchmark::DoNotOptimize(ring_eigenvalues(singular_value_equivalent(w, 7)));
}
BENCHMARK(BM_RingWindow)->Arg(28)->Arg(196)->Unit(benchmark::kMillisecond);

void BM_HaarUnitary(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(haar_unitary(static_cast<int>(state.range(0)), 5));
}
BENCHMARK(BM_HaarUnitary)->Arg(196)->Unit(benchmark::kMillisecond);

// One full-batch Adam step of the d-48-24-48-d autoencoder on 200 samples.
void BM_TrainStep(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  auto model = init_model(d, 1);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u;
  Eigen::MatrixXd x(d, 200);
  for (long i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
  AdamState adam = AdamState::zeros_like(model);
  const TrainConfig cfg;
  Gradients grads;
  for (auto _ : state) {
    benchmark::DoNotOptimize(loss_and_gradients(model, x, &grads));
    adam_step(model, grads, adam, cfg);
  }
}
BENCHMARK(BM_TrainStep)->Arg(28)->Arg(196)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
