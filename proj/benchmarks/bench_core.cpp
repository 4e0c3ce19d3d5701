#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "stripe/follower.hpp"
#include "stripe/grid.hpp"
#include "stripe/risk.hpp"
#include "stripe/stripe.hpp"

using namespace stripe;

namespace {

std::vector<double> normal_sample(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

ScenarioSet scenarios(std::size_t count, std::size_t dim) {
  ScenarioSpec spec;
  spec.kind = ScenarioSpec::Kind::normal;
  spec.dimension = dim;
  spec.location.assign(dim, 0.5);
  spec.scale.assign(dim, 0.2);
  return ScenarioSet::generate(spec, count, 3);
}

TypeSpace three_types() {
  return TypeSpace({0.0, 1.0, 2.0}, {RiskSpectrum::flat(), mean_semideviation_spectrum(0.5, 0.3),
                                     average_value_at_risk_spectrum(0.8)});
}

}  // namespace

static void BM_SpectralRisk(benchmark::State& state) {
  const EmpiricalLoss sample(normal_sample(static_cast<std::size_t>(state.range(0))));
  const auto spectrum = mean_semideviation_spectrum(0.5, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_risk(sample, spectrum));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SpectralRisk)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

static void BM_SortedSample(benchmark::State& state) {
  const auto values = normal_sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(EmpiricalLoss(values));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SortedSample)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

static void BM_SolveFollower(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto data = scenarios(200, dim);
  const auto types = three_types();
  const TypeDistribution mu({0.5, 0.3, 0.2});
  const auto model = LossModel::quadratic(Box(Point(dim, 0.0), Point(dim, 1.0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_follower(mu, types, data, model).value);
}
BENCHMARK(BM_SolveFollower)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_RiskTable(benchmark::State& state) {
  const auto data = scenarios(200, 1);
  const auto types = three_types();
  const auto model = LossModel::quadratic(Box({0.0}, {1.0}));
  const auto grid = model.domain().grid(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    const RiskTable table(types, data, model, grid);
    benchmark::DoNotOptimize(table.points());
  }
}
BENCHMARK(BM_RiskTable)->Arg(101)->Arg(1001)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
