#include <benchmark/benchmark.h>

#include "dyner/ldp_numerics.hpp"
#include "dyner/regime_analytics.hpp"
#include "dyner/resample_analytics.hpp"
#include "dyner/rng.hpp"
#include "dyner/simulator.hpp"

namespace {

using namespace dyner;

RegimeModel two_regime(int n) {
  Matrix q(2, 2);
  q << -2.0, 2.0, 3.0, -3.0;
  Vector lambda(2), mu(2);
  lambda << 0.3, 0.5;
  mu << 1.0, 0.1;
  return RegimeModel(validate_generator(q), lambda, mu, n, 1.0);
}

ScaledResampleLaw uniform_rates() {
  return ScaledResampleLaw(PairLaw::independent_uniform(0.0, 5.0, 0.0, 3.0), 1.0);
}

void BM_FactorialMoments(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const RegimeModel m = two_regime(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(factorial_moments(m, n + 1, Scaling::kScaled));
  }
}
BENCHMARK(BM_FactorialMoments)->Arg(10)->Arg(45)->Arg(200);

void BM_StationaryJointGenerator(benchmark::State& state) {
  const RegimeModel m = two_regime(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(stationary_joint(m, JointMethod::kGeneratorSolve, Scaling::kScaled));
  }
}
BENCHMARK(BM_StationaryJointGenerator)->Arg(45)->Arg(500);

void BM_KernelStationary(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ResampleModel model(uniform_rates().embedded(n), n);
  for (auto _ : state) benchmark::DoNotOptimize(kernel_stationary(model));
}
BENCHMARK(BM_KernelStationary)->Arg(45)->Arg(150)->Unit(benchmark::kMillisecond);

void BM_SimulateRegimeAggregate(benchmark::State& state) {
  const RegimeModel m = two_regime(static_cast<int>(state.range(0)));
  const double horizon = 20.0 / m.gamma_star();
  std::uint64_t index = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        simulate_regime_aggregate(m, horizon, 0, {1, index++}, {Scaling::kScaled, -1, {horizon}}));
  }
}
BENCHMARK(BM_SimulateRegimeAggregate)->Arg(45)->Arg(1000);

void BM_SimulateResampleContinuous(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ContinuousResampleSpec spec{uniform_rates().eta_zeta, 1.0 / n};
  std::uint64_t index = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        simulate_resample_continuous(spec, n, 5.0, 0, {1, index++}, {Scaling::kUnscaled, -1, {5.0}}));
  }
}
BENCHMARK(BM_SimulateResampleContinuous)->Arg(45);

void BM_Binomial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  CounterRng rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(binomial(rng, n, 0.4));
}
BENCHMARK(BM_Binomial)->Arg(20)->Arg(1000)->Arg(100000);

void BM_LegendreTransform(benchmark::State& state) {
  const ScaledResampleLaw law = uniform_rates();
  double y = -1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(local_rate_resample(0.4, y, law));
    y = y > 1.0 ? -1.0 : y + 0.01;
  }
}
BENCHMARK(BM_LegendreTransform);

}  // namespace

BENCHMARK_MAIN();
