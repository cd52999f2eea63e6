#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "copulacov/copula_model.hpp"
#include "copulacov/empirical.hpp"
#include "copulacov/functionals.hpp"
#include "copulacov/montecarlo.hpp"
#include "copulacov/pair_sample.hpp"

using namespace copulacov;

namespace {

PairSample gaussian_sample(std::int64_t n) {
  return CopulaModel::gaussian(0.5).sample(static_cast<std::size_t>(n), 17);
}

// O(n^2) pair count, the baseline the merge-sort path is measured against.
std::int64_t discordant_pairs_naive(const PairSample& s) {
  std::int64_t d = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) d += (s[i].x - s[j].x) * (s[i].y - s[j].y) < 0;
  }
  return d;
}

}  // namespace

static void BM_KendallMergeSort(benchmark::State& state) {
  const auto s = gaussian_sample(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kendall_tau_exact(s));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KendallMergeSort)->RangeMultiplier(4)->Range(256, 1 << 18)->Complexity(benchmark::oNLogN);

static void BM_KendallNaive(benchmark::State& state) {
  const auto s = gaussian_sample(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(discordant_pairs_naive(s));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KendallNaive)->RangeMultiplier(4)->Range(256, 1 << 14)->Complexity(benchmark::oNSquared);

static void BM_EmpiricalCopulaBuild(benchmark::State& state) {
  const auto s = gaussian_sample(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(empirical_copula(s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EmpiricalCopulaBuild)->Range(1 << 8, 1 << 16);

static void BM_EmpiricalCopulaQuery(benchmark::State& state) {
  const auto c = empirical_copula(gaussian_sample(state.range(0)));
  double u = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(c(u, 1.0 - u));
    u = u > 0.9 ? 0.1 : u + 0.0137;
  }
}
BENCHMARK(BM_EmpiricalCopulaQuery)->Range(1 << 8, 1 << 16);

static void BM_RankFunctionalsExact(benchmark::State& state) {
  const auto c = empirical_copula(gaussian_sample(state.range(0)));
  for (auto _ : state) {
    for (auto f : {Functional::T1Blomqvist, Functional::T2Footrule, Functional::T3SpearmanRho, Functional::T4Gini})
      benchmark::DoNotOptimize(evaluate_exact(f, c));
  }
}
BENCHMARK(BM_RankFunctionalsExact)->Range(1 << 8, 1 << 14);

static void BM_MonteCarloReplications(benchmark::State& state) {
  ExperimentConfig config;
  config.model = CopulaModel::fgm(0.5);
  config.n = 500;
  config.replications = 200;
  config.workers = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(config));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(config.replications));
}
BENCHMARK(BM_MonteCarloReplications)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
