#include <benchmark/benchmark.h>

#include "rcdenoise/dynamics.hpp"
#include "rcdenoise/ekf.hpp"
#include "rcdenoise/metrics.hpp"
#include "rcdenoise/noise.hpp"
#include "rcdenoise/reservoir.hpp"
#include "rcdenoise/training.hpp"

using namespace rcdenoise;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
  std::srand(seed);
  return Matrix::Random(rows, cols);
}

}  // namespace

static void BM_ReservoirRun(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto esn = build_reservoir({n, 0.8, 0.9, 1.0, 0.3}, 2, 1);
  const Matrix u = random_matrix(5000, 2, 3);
  for (auto _ : state) benchmark::DoNotOptimize(run(esn, u));
  state.SetItemsProcessed(state.iterations() * u.rows());
}
BENCHMARK(BM_ReservoirRun)->Arg(100)->Arg(300)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_RidgeFit(benchmark::State& state) {
  const auto n = state.range(0);
  const Matrix r = random_matrix(5000, n, 4);
  const Matrix y = random_matrix(5000, 3, 5);
  for (auto _ : state) benchmark::DoNotOptimize(ridge_fit(r, y, 1e-6));
}
BENCHMARK(BM_RidgeFit)->Arg(100)->Arg(300)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_SelectLambda(benchmark::State& state) {
  const auto n = state.range(0);
  const Matrix r = random_matrix(5000, n, 6);
  const Matrix y = random_matrix(5000, 3, 7);
  for (auto _ : state) benchmark::DoNotOptimize(select_lambda(r, y, {}));
}
BENCHMARK(BM_SelectLambda)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

static void BM_Welch(benchmark::State& state) {
  const auto v = gaussian_white(static_cast<std::size_t>(state.range(0)), 1.0, 8);
  for (auto _ : state) benchmark::DoNotOptimize(welch_psd(v, 1.0));
}
BENCHMARK(BM_Welch)->Arg(1 << 14)->Arg(1 << 17);

static void BM_LorenzEkfStep(benchmark::State& state) {
  const LorenzParams p;
  const auto model = lorenz_model(p, 0.005, 1e-3, {0, 1}, Vector::Constant(2, 0.5),
                                  state.range(0) ? JacobianMode::Analytic : JacobianMode::FiniteDifference);
  FilterState s{Vector::Ones(3), Matrix::Identity(3, 3)};
  const Vector u(0);
  const Vector z = Vector::Ones(2);
  for (auto _ : state) {
    s = ekf_step(model, s, u, z);
    benchmark::DoNotOptimize(s.x.data());
  }
}
BENCHMARK(BM_LorenzEkfStep)->Arg(0)->Arg(1);

BENCHMARK_MAIN();
