#include <benchmark/benchmark.h>

#include <cmath>
#include <span>

#include "pathwise/generators.hpp"
#include "pathwise/integration.hpp"
#include "pathwise/quadvar.hpp"
#include "pathwise/trading.hpp"

namespace pw = pathwise;

namespace {

pw::SampledPath walk(int level) {
  return pw::generate({pw::ScaledWalkSpec{}}, 1, pw::PartitionSequence::dyadic(1.0, level));
}

void BM_QvAlong(benchmark::State& state) {
  const int level = static_cast<int>(state.range(0));
  const auto seq = pw::PartitionSequence::dyadic(1.0, level);
  const auto path = walk(level);
  for (auto _ : state) benchmark::DoNotOptimize(pw::qv_along(path, seq));
  state.SetComplexityN(std::int64_t{1} << level);
}
BENCHMARK(BM_QvAlong)->DenseRange(8, 16, 4)->Complexity();

void BM_QvMatrix(benchmark::State& state) {
  const int level = static_cast<int>(state.range(0));
  const auto seq = pw::PartitionSequence::dyadic(1.0, level);
  const auto path = pw::generate({pw::ScaledWalkSpec{1.0, 0.0, 3}}, 1, seq);
  for (auto _ : state) benchmark::DoNotOptimize(pw::qv_matrix(path, seq));
}
BENCHMARK(BM_QvMatrix)->DenseRange(8, 14, 3);

void BM_PVariationDp(benchmark::State& state) {
  const int level = static_cast<int>(state.range(0));
  const auto path = walk(level);
  for (auto _ : state) benchmark::DoNotOptimize(pw::p_variation(path, 2.5, pw::PVariationMode::exact_dp));
  state.SetComplexityN(std::int64_t{1} << level);
}
BENCHMARK(BM_PVariationDp)->DenseRange(6, 10, 2)->Arg(11)->Complexity(benchmark::oNSquared);

void BM_FollmerCylinder(benchmark::State& state) {
  const int level = static_cast<int>(state.range(0));
  const auto seq = pw::PartitionSequence::dyadic(1.0, level);
  const auto path = walk(level);
  const auto grad = [](std::span<const double> x) { return pw::Vector{2.0 * x[0]}; };
  for (auto _ : state) benchmark::DoNotOptimize(pw::follmer_integral_cylinder(grad, path, seq));
}
BENCHMARK(BM_FollmerCylinder)->DenseRange(8, 16, 4);

void BM_HedgeBlackScholes(benchmark::State& state) {
  const int level = static_cast<int>(state.range(0));
  const auto seq = pw::PartitionSequence::dyadic(1.0, level);
  const auto path = pw::generate({pw::GeometricWalkSpec{0.3, 1.0, 1}}, 1, seq);
  const auto f = pw::black_scholes_functional(0.2, 1.0, 1.0);
  const auto payoff = pw::vanilla_payoff(1.0, pw::OptionType::call);
  for (auto _ : state)
    benchmark::DoNotOptimize(pw::hedge(f, payoff, pw::DensitySpec::geometric(0.2), path,
                                       pw::DensitySpec::geometric(0.3), seq));
}
BENCHMARK(BM_HedgeBlackScholes)->DenseRange(10, 14, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
