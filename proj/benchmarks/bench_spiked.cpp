#include <benchmark/benchmark.h>

#include "spiked/likelihood.hpp"
#include "spiked/observation.hpp"
#include "spiked/overlap.hpp"
#include "spiked/prior.hpp"
#include "spiked/rs_threshold.hpp"
#include "spiked/scalar_channel.hpp"

using namespace spiked;

static void BM_Psi(benchmark::State& state) {
  const Prior prior = sparse_rademacher(0.05);
  const double r = static_cast<double>(state.range(0)) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(psi(prior, r));
}
BENCHMARK(BM_Psi)->Arg(1)->Arg(10)->Arg(50);

static void BM_MaximizeRS(benchmark::State& state) {
  const Prior prior = sparse_rademacher(0.05);
  for (auto _ : state) benchmark::DoNotOptimize(maximize_rs(prior, 1.0));
}
BENCHMARK(BM_MaximizeRS)->Unit(benchmark::kMillisecond);

static void BM_LogLRExact(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto draw = sample_observation(rademacher(), n, 0.5, kSigmaInfinity, 1);
  for (auto _ : state) benchmark::DoNotOptimize(log_lr_exact(draw.observation, 0.5, rademacher()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(configuration_count(rademacher(), n)));
}
BENCHMARK(BM_LogLRExact)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_LogLRMonteCarlo(benchmark::State& state) {
  const auto draw = sample_observation(rademacher(), 12, 0.5, kSigmaInfinity, 1);
  for (auto _ : state) benchmark::DoNotOptimize(log_lr_mc(draw.observation, 0.5, rademacher(), 100000, 2));
  state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_LogLRMonteCarlo)->Unit(benchmark::kMillisecond);

static void BM_GibbsOverlap(benchmark::State& state) {
  const auto draw = sample_observation(rademacher(), 12, 0.5, kSigmaInfinity, 1);
  OverlapParams params;
  params.seed = 3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        overlap_moments(draw.observation, *draw.spike, 0.5, rademacher(), OverlapMethod::gibbs, params));
  }
  // Two replica chains, burn-in plus measurement sweeps.
  state.SetItemsProcessed(state.iterations() * 2 * (params.burn_in + params.sweeps));
}
BENCHMARK(BM_GibbsOverlap)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
