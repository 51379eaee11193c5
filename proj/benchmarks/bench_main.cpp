#include <random>

#include <benchmark/benchmark.h>

#include "iriscs/iris.hpp"
#include "iriscs/recon.hpp"
#include "iriscs/sampling.hpp"
#include "iriscs/transforms.hpp"

using namespace iriscs;

namespace {

Grid noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  Grid g(n, n);
  for (double& v : g.values()) v = u(rng);
  return g;
}

Grid blobs(std::size_t n) {
  Grid g(n, n, 40.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if ((r / 16 + c / 24) % 2 == 0) g(r, c) = 180.0;
  return g;
}

void BM_Forward(benchmark::State& state, TransformDomain domain) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const transforms::Plan plan(n, n, domain);
  const Grid img = noise(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(plan.forward(img));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n * n));
}
BENCHMARK_CAPTURE(BM_Forward, dct, TransformDomain::DCT)->Arg(32)->Arg(128)->Arg(256);
BENCHMARK_CAPTURE(BM_Forward, dft, TransformDomain::DFT)->Arg(32)->Arg(128)->Arg(256);

void BM_RoundTrip(benchmark::State& state, TransformDomain domain) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const transforms::Plan plan(n, n, domain);
  const Grid img = noise(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(plan.inverse(plan.forward(img)));
}
BENCHMARK_CAPTURE(BM_RoundTrip, dct, TransformDomain::DCT)->Arg(128);
BENCHMARK_CAPTURE(BM_RoundTrip, dft, TransformDomain::DFT)->Arg(128);

void BM_TvGradient(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Grid img = noise(n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(recon::tv_gradient(img, 1e-3));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n * n));
}
BENCHMARK(BM_TvGradient)->Arg(32)->Arg(128)->Arg(512);

void BM_Reconstruct(benchmark::State& state, SolverMode mode, TransformDomain domain) {
  const Grid img = blobs(128);
  const auto mask = sampling::generate_mask(128, 128, 0.2, 4);
  const auto meas = sampling::measure(img, mask);
  SolverConfig cfg;
  cfg.mode = mode;
  cfg.domain = domain;
  cfg.max_iters = static_cast<std::size_t>(state.range(0));
  cfg.convergence_tol = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(recon::reconstruct(meas, mask, cfg));
}
BENCHMARK_CAPTURE(BM_Reconstruct, tv, SolverMode::TV, TransformDomain::DCT)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Reconstruct, tv_domain_dct, SolverMode::TVDomain, TransformDomain::DCT)
    ->Arg(50)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Reconstruct, tv_domain_dft, SolverMode::TVDomain, TransformDomain::DFT)
    ->Arg(50)
    ->Unit(benchmark::kMillisecond);

void BM_Hamming(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::bernoulli_distribution coin(0.5), valid(0.8);
  IrisCode a(8, 30, 1), b(8, 30, 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a.set_bit(i, coin(rng));
    a.set_mask(i, valid(rng));
    b.set_bit(i, coin(rng));
    b.set_mask(i, valid(rng));
  }
  const int shifts = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(iris::hamming(a, b, shifts));
}
BENCHMARK(BM_Hamming)->Arg(0)->Arg(8);

}  // namespace
BENCHMARK_MAIN();
