#include <benchmark/benchmark.h>

#include <random>

#include "cosserat/stokes.hpp"

namespace {

using namespace cosserat;

PointForceSet make_sources(std::size_t n) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PointForceSet s;
  for (std::size_t k = 0; k < n; ++k) {
    s.positions.emplace_back(u(rng), u(rng), u(rng));
    s.forces.emplace_back(u(rng), u(rng), u(rng));
  }
  return s;
}

void BM_velocity_sum(benchmark::State& state) {
  const auto src = make_sources(static_cast<std::size_t>(state.range(0)));
  const FluidParams fp{1.0, 0.1};
  const Vec3 x(0.3, -0.7, 1.1);
  for (auto _ : state) benchmark::DoNotOptimize(velocity_at(x, src, fp));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_velocity_sum)->Arg(16)->Arg(64)->Arg(256)->Complexity();

void BM_mobility_assembly(benchmark::State& state) {
  const auto src = make_sources(static_cast<std::size_t>(state.range(0)));
  const FluidParams fp{1.0, 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(assemble_mobility(src.positions, fp));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_mobility_assembly)->Arg(16)->Arg(32)->Arg(64)->Complexity();

void BM_mobility_solve(benchmark::State& state) {
  const auto src = make_sources(static_cast<std::size_t>(state.range(0)));
  const FluidParams fp{1.0, 0.1};
  const MatX M = assemble_mobility(src.positions, fp);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VecX U(M.rows());
  for (long i = 0; i < U.size(); ++i) U[i] = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(solve_forces_for_velocities(M, U));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_mobility_solve)->Arg(16)->Arg(32)->Arg(64)->Complexity();

}  // namespace

BENCHMARK_MAIN();
