#include <benchmark/benchmark.h>

#include "ldsmdl/criteria.hpp"
#include "ldsmdl/datagen.hpp"
#include "ldsmdl/em.hpp"
#include "ldsmdl/inference.hpp"
#include "ldsmdl/lyapunov.hpp"
#include "ldsmdl/simulate.hpp"

namespace {

using namespace ldsmdl;

LdsParams model(int d) {
  RandomLdsConfig rc;
  rc.d = d;
  rc.seed = 42;
  return random_stable_lds(rc);
}

void BM_KalmanFilter(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const LdsParams p = model(d);
  const SequenceData y = simulate(p, 1000, 20, 1);
  for (auto _ : state) benchmark::DoNotOptimize(kalman_filter(p, y).loglik);
  state.SetItemsProcessed(state.iterations() * y.length());
}
BENCHMARK(BM_KalmanFilter)->Arg(2)->Arg(4)->Arg(8)->Arg(12);

void BM_Smooth(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const LdsParams p = model(d);
  const SequenceData y = simulate(p, 1000, 20, 1);
  for (auto _ : state) benchmark::DoNotOptimize(smooth(p, y));
  state.SetItemsProcessed(state.iterations() * y.length());
}
BENCHMARK(BM_Smooth)->Arg(2)->Arg(4)->Arg(8)->Arg(12);

void BM_Lyapunov(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const LdsParams p = model(d);
  for (auto _ : state) benchmark::DoNotOptimize(solve_discrete_lyapunov(p.A, p.R1));
}
BENCHMARK(BM_Lyapunov)->Arg(4)->Arg(16)->Arg(32)->Arg(64);

void BM_EmFit(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const SequenceData y = simulate(model(4), 100, 20, 5);
  EmConfig config;
  config.max_iters = 50;
  const LdsParams init = random_initialization(y, d, 0, 0, config);
  for (auto _ : state) benchmark::DoNotOptimize(em_fit(y, d, init, config).loglik);
}
BENCHMARK(BM_EmFit)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_EmpiricalFisher(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const LdsParams p = model(d);
  const SequenceData y = simulate(p, 200, 20, 3);
  for (auto _ : state) benchmark::DoNotOptimize(empirical_fisher_log_det(p, y));
}
BENCHMARK(BM_EmpiricalFisher)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
