#include <benchmark/benchmark.h>

#include "cosserat/rod.hpp"
#include "cosserat/swimmer.hpp"

namespace {

using namespace cosserat;

RodScenario scenario(std::size_t nodes) {
  RodParameters p;
  p.n_nodes = nodes;
  p.stiffness_shear = Vec3(100.0, 100.0, 100.0);
  return make_bent_rod_scenario(p, 0.1, 1, 0.01);
}

void BM_semi_analytical_step(benchmark::State& state) {
  const RodScenario sc = scenario(static_cast<std::size_t>(state.range(0)));
  RodState s = sc.initial;
  for (auto _ : state) {
    s = step_semi_analytical(s, 1e-6, sc.loads, sc.params);
    benchmark::DoNotOptimize(s.time);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_semi_analytical_step)->Arg(16)->Arg(50)->Arg(128)->Complexity();

void BM_full_numeric_step(benchmark::State& state) {
  const RodScenario sc = scenario(static_cast<std::size_t>(state.range(0)));
  FullState s = to_full_state(sc.initial, sc.params);
  for (auto _ : state) {
    s = step_full_numeric(s, 1e-8, sc.loads, sc.params);
    benchmark::DoNotOptimize(s.time);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_full_numeric_step)->Arg(16)->Arg(50)->Arg(128)->Complexity();

void BM_coupled_swimmer_step(benchmark::State& state) {
  SwimmerConfig cfg;
  cfg.rod.n_nodes = static_cast<std::size_t>(state.range(0));
  cfg.rod.stiffness_bend = Vec3(2e-3, 2e-3, 2e-3);
  cfg.rod.stiffness_shear = Vec3(0.2, 0.2, 0.2);
  cfg.rod.kappa_ref = Vec3(4.0, 0.0, 8.0);
  cfg.rod.base = BoundaryCondition::free_end;
  cfg.rod.tip = BoundaryCondition::free_end;
  cfg.fluid.epsilon = 0.08;
  cfg.head_epsilon = 0.12;
  cfg.motor_torque = 4e-3;
  RodState s = init_swimmer(cfg.rod);
  for (auto _ : state) {
    s = coupled_step(s, cfg, 5e-5);
    benchmark::DoNotOptimize(s.time);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_coupled_swimmer_step)->Arg(8)->Arg(16)->Arg(32)->Complexity();

}  // namespace

BENCHMARK_MAIN();
