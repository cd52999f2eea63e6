#include <benchmark/benchmark.h>

#include "copulacov/certification.hpp"
#include "copulacov/copula_model.hpp"
#include "copulacov/functionals.hpp"
#include "copulacov/process_covariance.hpp"

using namespace copulacov;

static void BM_CovChatClayton(benchmark::State& state) {
  const auto m = CopulaModel::clayton(2.0);
  double u = 0.2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cov_process_Chat(m, u, 0.4, 0.7, u));
    u = u > 0.8 ? 0.2 : u + 0.013;
  }
}
BENCHMARK(BM_CovChatClayton);

static void BM_CovChatGaussian(benchmark::State& state) {
  const auto m = CopulaModel::gaussian(0.5);
  double u = 0.2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cov_process_Chat(m, u, 0.4, 0.7, u));
    u = u > 0.8 ? 0.2 : u + 0.013;
  }
}
BENCHMARK(BM_CovChatGaussian);

// grid^4 points per run.
static void BM_CertifyFullCovariance(benchmark::State& state) {
  const auto m = CopulaModel::fgm(0.5);
  const auto grid = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(certify_dominance(m, Proposition::P1FullCovariance, grid));
}
BENCHMARK(BM_CertifyFullCovariance)->Arg(11)->Arg(21)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_VarianceLineMeasure(benchmark::State& state) {
  const auto m = CopulaModel::clayton(1.0);
  VarianceOptions o;
  o.nodes_2d = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(asymptotic_variance(Functional::T2Footrule, m, EstimatorKind::RankBased, o));
}
BENCHMARK(BM_VarianceLineMeasure)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_VarianceSpearmanIndependence(benchmark::State& state) {
  VarianceOptions o;
  o.prefer_closed_form = false;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        asymptotic_variance(Functional::T3SpearmanRho, CopulaModel::independence(), EstimatorKind::RankBased, o));
}
BENCHMARK(BM_VarianceSpearmanIndependence)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_PopulationValueGaussian(benchmark::State& state) {
  const auto m = CopulaModel::gaussian(0.75);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(Functional::KendallTau, m));
}
BENCHMARK(BM_PopulationValueGaussian)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
