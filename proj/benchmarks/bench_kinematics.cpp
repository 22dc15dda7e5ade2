#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "cosserat/grid.hpp"
#include "cosserat/kinematics.hpp"

namespace {

using namespace cosserat;

std::vector<Vec3> sample_vectors(std::size_t n) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::vector<Vec3> out(n);
  for (Vec3& p : out) p = Vec3(u(rng), u(rng), u(rng));
  return out;
}

void BM_body_rate_map(benchmark::State& state) {
  const auto ps = sample_vectors(1024);
  const Vec3 dp(0.3, -0.2, 0.1);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(body_rate_from_p(ps[i], dp));
    i = (i + 1) & 1023;
  }
}
BENCHMARK(BM_body_rate_map);

void BM_rotation_from_p(benchmark::State& state) {
  const auto ps = sample_vectors(1024);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rotation_from_p(ps[i]));
    i = (i + 1) & 1023;
  }
}
BENCHMARK(BM_rotation_from_p);

void BM_residual_grid(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  GridSpec g{n, n, 0.0, 1.0, 0.0, 1.0};
  KinematicFields f(g);
  const auto fill = [&](Field3& F) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        F(i, j) = Vec3(std::sin(1.7 * g.s(i)), std::cos(2.3 * g.t(j)),
                       std::sin(g.s(i) + g.t(j)));
  };
  fill(f.omega);
  fill(f.kappa);
  fill(f.nu);
  fill(f.v);
  for (auto _ : state) benchmark::DoNotOptimize(kinematic_residuals(f));
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_residual_grid)->Arg(32)->Arg(64)->Arg(128)->Complexity();

}  // namespace

BENCHMARK_MAIN();
