#include <benchmark/benchmark.h>

#include "sphererig/centering.hpp"
#include "sphererig/experiments.hpp"
#include "sphererig/harmonics.hpp"
#include "sphererig/rigidity.hpp"

using namespace sphererig;

namespace {

SphereMap test_map(int n_theta) {
  GeneratorParams p;
  p.eps = 0.05;
  return generate(Family::perturbed_moebius, p, SphereGrid::build(n_theta), 7);
}

void BM_Analyze(benchmark::State& state) {
  const SphereMap u = test_map(int(state.range(0)));
  const VectorField f = u.as_field();
  for (auto _ : state) benchmark::DoNotOptimize(sh_analyze(f));
}
BENCHMARK(BM_Analyze)->Arg(24)->Arg(48)->Arg(96)->Unit(benchmark::kMillisecond);

void BM_Gradient(benchmark::State& state) {
  const SphereMap u = test_map(int(state.range(0)));
  const VectorField f = u.as_field();
  for (auto _ : state) benchmark::DoNotOptimize(tangential_gradient(f));
}
BENCHMARK(BM_Gradient)->Arg(24)->Arg(48)->Arg(96)->Unit(benchmark::kMillisecond);

void BM_EvaluateAtPoints(benchmark::State& state) {
  const SphereMap u = test_map(int(state.range(0)));
  const auto points = fibonacci_sphere(int(u.size()));
  const auto& e = u.expansion();
  for (auto _ : state) benchmark::DoNotOptimize(e.evaluate_vector(points));
}
BENCHMARK(BM_EvaluateAtPoints)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_Degree(benchmark::State& state) {
  const SphereMap u = test_map(int(state.range(0)));
  for (auto _ : state) {
    const SphereMap fresh(u.grid(), u.values());
    benchmark::DoNotOptimize(degree(fresh));
  }
}
BENCHMARK(BM_Degree)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_CenterMap(benchmark::State& state) {
  const SphereMap u = test_map(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(center_map(u));
}
BENCHMARK(BM_CenterMap)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_RigidityReport(benchmark::State& state) {
  const SphereMap u = test_map(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(analyze(u));
}
BENCHMARK(BM_RigidityReport)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
