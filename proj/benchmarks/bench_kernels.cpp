#include <benchmark/benchmark.h>

#include "torrent/datagen.hpp"
#include "torrent/iht.hpp"
#include "torrent/l1.hpp"
#include "torrent/linalg.hpp"
#include "torrent/solver.hpp"
#include "torrent/thresholding.hpp"

namespace {

using namespace torrent;

RegressionInstance make_instance(Index p, Index n, double alpha, std::uint64_t seed) {
  InstanceSpec spec;
  spec.p = p;
  spec.n = n;
  spec.alpha = alpha;
  spec.seed = seed;
  return gen_instance(spec);
}

void BM_HardThresholdIndices(benchmark::State& state) {
  const Index n = state.range(0);
  const auto inst = make_instance(1, n, 0.0, 7);
  const Index k = active_set_size(0.3, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hard_threshold_indices(inst.y, k));
  }
}
BENCHMARK(BM_HardThresholdIndices)->Arg(1000)->Arg(100000);

void BM_LeastSquaresUpdate(benchmark::State& state) {
  const Index p = state.range(0);
  const auto inst = make_instance(p, 10 * p, 0.0, 11);
  const auto full = full_set(inst.x.cols());
  for (auto _ : state) {
    benchmark::DoNotOptimize(update_fc(inst.x, inst.y, full));
  }
}
BENCHMARK(BM_LeastSquaresUpdate)->Arg(20)->Arg(100)->Arg(400);

void BM_GradientUpdate(benchmark::State& state) {
  const Index p = state.range(0);
  const auto inst = make_instance(p, 10 * p, 0.0, 13);
  const auto full = full_set(inst.x.cols());
  const Model theta = Model::Zero(p);
  const double eta = 1.0 / spectral_norm_estimate(inst.x);
  for (auto _ : state) {
    benchmark::DoNotOptimize(update_gd(inst.x, inst.y, full, theta, eta));
  }
}
BENCHMARK(BM_GradientUpdate)->Arg(20)->Arg(400);

void BM_TorrentFC(benchmark::State& state) {
  const auto inst = make_instance(20, 1000, 0.3, 17);
  SolverConfig cfg;
  cfg.variant = Variant::FC;
  cfg.beta = 0.35;
  cfg.epsilon = 1e-10;
  cfg.max_iters = 50;
  for (auto _ : state) {
    benchmark::DoNotOptimize(torrent_solve(inst.x, inst.y, cfg));
  }
}
BENCHMARK(BM_TorrentFC);

void BM_TorrentHYB(benchmark::State& state) {
  const auto inst = make_instance(200, 2000, 0.3, 19);
  SolverConfig cfg;
  cfg.variant = Variant::HYB;
  cfg.beta = 0.35;
  cfg.epsilon = 1e-10;
  cfg.max_iters = 100;
  for (auto _ : state) {
    benchmark::DoNotOptimize(torrent_solve(inst.x, inst.y, cfg));
  }
}
BENCHMARK(BM_TorrentHYB);

void BM_IHTInner(benchmark::State& state) {
  InstanceSpec spec;
  spec.p = 300;
  spec.n = 143;
  spec.sparsity_s_star = 5;
  spec.seed = 23;
  const auto inst = gen_instance(spec);
  IHTConfig cfg;
  cfg.sparsity_s = 10;
  cfg.inner_tol = 1e-9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(iht_solve(inst.x, inst.y, cfg));
  }
}
BENCHMARK(BM_IHTInner);

void BM_L1Solve(benchmark::State& state) {
  const auto inst = make_instance(20, 500, 0.2, 29);
  L1Config cfg;
  cfg.lambda = 1.0;
  cfg.max_iters = 2000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(l1_solve(inst.x, inst.y, cfg));
  }
}
BENCHMARK(BM_L1Solve);

}  // namespace

BENCHMARK_MAIN();
