#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cosserat/errors.hpp"
#include "cosserat/kinematics.hpp"
#include "cosserat/rod.hpp"
#include "cosserat/swimmer.hpp"
#include "cosserat/types.hpp"

using namespace cosserat;

namespace {

RodParameters flagellum(std::size_t n, const Vec3& kappa_ref) {
  RodParameters p;
  p.n_nodes = n;
  p.kappa_ref = kappa_ref;
  p.base = BoundaryCondition::free_end;
  p.tip = BoundaryCondition::free_end;
  return p;
}

}  // namespace

TEST_CASE("straight initialization is the exact reference segment") {
  const RodParameters params = flagellum(15, Vec3::Zero());
  const RodState st = init_swimmer(params);
  const Centerline c = reconstruct_centerline(st, params);
  for (std::size_t i = 0; i < params.n_nodes; ++i) {
    const double s = params.ds() * static_cast<double>(i);
    CHECK(st.p[i].norm() == 0.0);
    CHECK((st.q[i] + s * params.nu_ref).norm() < 1e-15);
    CHECK((c.positions[i] - s * Vec3(0.0, 0.0, 1.0)).norm() < 1e-13);
    CHECK(st.omega[i].norm() == 0.0);
    CHECK(st.v[i].norm() == 0.0);
  }
}

TEST_CASE("helical initialization stays on the exact helix") {
  // p(s) = s kappa_ref (rebased) and q(s) = -s dexp(s kappa_ref) nu_ref give
  // node positions r = -R(p) q exactly on the helix of the intrinsic shape;
  // the trapezoid centerline must agree to its own second-order accuracy.
  const Vec3 kref(3.0, 0.0, 4.0);
  const auto residuals = [&](std::size_t nodes, double& center, double& kap, double& nu_r) {
    const RodParameters params = flagellum(nodes, kref);
    const RodState st = init_swimmer(params);
    const Centerline c = reconstruct_centerline(st, params);
    center = kap = nu_r = 0.0;
    for (std::size_t i = 0; i < params.n_nodes; ++i) {
      CHECK(st.p[i].norm() <= kPi + 1e-12);
      const Vec3 exact = -(rotation_from_p(st.p[i]) * st.q[i]);
      center = std::max(center, (c.positions[i] - exact).norm());
    }
    auto [kappa, nu] = strains_from_state(st, params);
    for (std::size_t i = 0; i < params.n_nodes; ++i) {
      kap = std::max(kap, (kappa[i] - kref).norm());
      nu_r = std::max(nu_r, (nu[i] - params.nu_ref).norm());
    }
  };
  // p(s) is linear along a fixed axis, so the aligned difference stencil is
  // exact for kappa (roundoff floor only). The trapezoid centerline and the
  // q_s stencil behind nu carry genuine second-order truncation: those must
  // shrink 4x when the grid doubles.
  double c120, k120, n120, c240, k240, n240;
  residuals(120, c120, k120, n120);
  residuals(240, c240, k240, n240);
  CHECK(k120 < 1e-11);
  CHECK(k240 < 1e-11);
  CHECK(c120 / c240 > 3.0);
  CHECK(n120 / n240 > 3.0);
  CHECK(c240 < 1e-4);
  CHECK(n240 < 1e-4);
}

TEST_CASE("motor torque scales with the gradient and clamps") {
  SwimmerConfig cfg;
  cfg.motor_torque = 0.5;
  cfg.chemotaxis_gain = 1.0;
  cfg.gradient = Vec3(0.0, 0.0, 0.4);
  const Mat3 I = Mat3::Identity();
  // d3 = z, gradient.d3 = 0.4: scale 1.4.
  CHECK((motor_torque(cfg, I) - Vec3(0.0, 0.0, 0.7)).norm() < 1e-15);
  cfg.gradient = Vec3(0.0, 0.0, 100.0);  // clamp at 2
  CHECK((motor_torque(cfg, I) - Vec3(0.0, 0.0, 1.0)).norm() < 1e-15);
  cfg.gradient = Vec3(0.0, 0.0, -100.0);  // clamp at 0
  CHECK(motor_torque(cfg, I).norm() == 0.0);
  cfg.chemotaxis_gain = 0.0;
  cfg.gradient = Vec3(1.0, 2.0, 3.0);
  CHECK((motor_torque(cfg, I) - Vec3(0.0, 0.0, 0.5)).norm() < 1e-15);
}

TEST_CASE("relaxed straight swimmer is a fixed point without a motor") {
  SwimmerConfig cfg;
  cfg.rod = flagellum(10, Vec3::Zero());
  cfg.fluid = FluidParams{1.0, 0.1};
  cfg.motor_torque = 0.0;
  const RodState st = init_swimmer(cfg.rod);
  const RodState next = coupled_step(st, cfg, 1e-3);
  for (std::size_t i = 0; i < cfg.rod.n_nodes; ++i) {
    CHECK((next.p[i] - st.p[i]).norm() < 1e-14);
    CHECK((next.q[i] - st.q[i]).norm() < 1e-14);
  }
  CHECK((next.r0 - st.r0).norm() < 1e-14);
}

TEST_CASE("axial motor torque on a straight rod spins without translating") {
  SwimmerConfig cfg;
  cfg.rod = flagellum(10, Vec3::Zero());
  cfg.fluid = FluidParams{1.0, 0.1};
  cfg.motor_torque = 0.2;
  RodState st = init_swimmer(cfg.rod);
  for (int k = 0; k < 20; ++k) st = coupled_step(st, cfg, 1e-3);
  // All nodes sit on the torque axis: no rodlet-induced translation.
  CHECK(st.r0.norm() < 1e-12);
  // The base frame accumulated roll about d3 with the torque's sign.
  CHECK(st.p[0][2] > 1e-4);
  CHECK(std::abs(st.p[0][0]) < 1e-12);
  CHECK(std::abs(st.p[0][1]) < 1e-12);
}

TEST_CASE("inertial coupling advances a finite state") {
  SwimmerConfig cfg;
  cfg.rod = flagellum(8, Vec3(2.0, 0.0, 1.0));
  cfg.rod.stiffness_bend = Vec3(1e-3, 1e-3, 1e-3);
  cfg.rod.stiffness_shear = Vec3(0.1, 0.1, 0.1);
  cfg.fluid = FluidParams{1.0, 0.1};
  cfg.motor_torque = 1e-3;
  cfg.mode = CouplingMode::inertial;
  RodState st = init_swimmer(cfg.rod);
  st = coupled_step(st, cfg, 1e-5);
  CHECK(st.time == doctest::Approx(1e-5));
  for (const Vec3& x : st.p) CHECK(std::isfinite(x.norm()));
  for (const Vec3& x : st.v) CHECK(std::isfinite(x.norm()));
}

TEST_CASE("simulation trace records the requested frames") {
  SwimmerConfig cfg;
  cfg.rod = flagellum(8, Vec3(2.0, 0.0, 1.0));
  cfg.rod.stiffness_bend = Vec3(1e-3, 1e-3, 1e-3);
  cfg.rod.stiffness_shear = Vec3(0.1, 0.1, 0.1);
  cfg.fluid = FluidParams{1.0, 0.08};
  cfg.motor_torque = 2e-3;
  const RodState st = init_swimmer(cfg.rod);
  const SimulationTrace tr = run_simulation(cfg, st, 1e-4, 10, 3);
  REQUIRE(tr.status == "ok");
  REQUIRE(tr.frames.size() == 5);  // steps 0, 3, 6, 9, 10
  CHECK(tr.frames[0].step == 0);
  CHECK(tr.frames[1].step == 3);
  CHECK(tr.frames[4].step == 10);
  CHECK(tr.frames[4].time == doctest::Approx(1e-3));
  CHECK(tr.dt == doctest::Approx(1e-4));
  CHECK(tr.stride == 3);
  for (const auto& f : tr.frames) {
    CHECK(f.positions.size() == cfg.rod.n_nodes);
    CHECK(f.p.size() == cfg.rod.n_nodes);
    CHECK(f.q.size() == cfg.rod.n_nodes);
  }
  CHECK_THROWS_AS((void)run_simulation(cfg, st, 1e-4, 10, 0), ValidationError);
}

TEST_CASE("failed runs return the truncated trace with the error text") {
  SwimmerConfig cfg;
  cfg.rod = flagellum(8, Vec3(2.0, 0.0, 1.0));
  cfg.rod.stiffness_bend = Vec3(50.0, 50.0, 50.0);  // stiff + huge dt: blows up
  cfg.rod.stiffness_shear = Vec3(50.0, 50.0, 50.0);
  cfg.fluid = FluidParams{1.0, 0.05};
  cfg.motor_torque = 0.5;
  const RodState st = init_swimmer(cfg.rod);
  const SimulationTrace tr = run_simulation(cfg, st, 10.0, 50, 1);
  CHECK(tr.status != "ok");
  CHECK(!tr.frames.empty());
  CHECK(tr.frames.size() < 52);
}

TEST_CASE("trace metrics on a synthetic trace") {
  SimulationTrace tr;
  tr.dt = 0.5;
  tr.stride = 1;
  tr.motor_torque_nominal = 2.0;
  for (int k = 0; k < 3; ++k) {
    TraceFrame f;
    f.step = static_cast<std::size_t>(k);
    f.time = 0.5 * k;
    const double roll = 0.15 * k;  // base rotates about d3 = z
    f.positions = {Vec3(0.3 * k, 0.0, 0.0), Vec3(0.3 * k, 0.0, 1.0)};
    f.p = {Vec3(0.0, 0.0, roll), Vec3(0.0, 0.0, roll)};
    f.q = {Vec3::Zero(), Vec3(0.0, 0.0, -1.0)};
    tr.frames.push_back(f);
  }
  const SwimMetrics m = trace_metrics(tr);
  CHECK((m.displacement - Vec3(0.6, 0.0, 0.0)).norm() < 1e-15);
  CHECK(m.mean_speed == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(m.base_roll_rate == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(m.efficiency == doctest::Approx(0.3).epsilon(1e-12));

  SimulationTrace empty;
  empty.frames.resize(1);
  CHECK_THROWS_AS((void)trace_metrics(empty), EmptyTrace);
}

TEST_CASE("reversing the motor torque reverses the roll") {
  SwimmerConfig cfg;
  cfg.rod = flagellum(10, Vec3(3.0, 0.0, 2.0));
  cfg.rod.stiffness_bend = Vec3(2e-3, 2e-3, 2e-3);
  cfg.rod.stiffness_shear = Vec3(0.2, 0.2, 0.2);
  cfg.fluid = FluidParams{1.0, 0.08};
  cfg.head_epsilon = 0.12;
  cfg.motor_torque = 2e-3;
  const RodState st = init_swimmer(cfg.rod);
  const SimulationTrace fwd = run_simulation(cfg, st, 2e-4, 60, 10);
  cfg.motor_torque = -2e-3;
  const SimulationTrace rev = run_simulation(cfg, st, 2e-4, 60, 10);
  REQUIRE(fwd.status == "ok");
  REQUIRE(rev.status == "ok");
  const double a = trace_metrics(fwd).base_roll_rate;
  const double b = trace_metrics(rev).base_roll_rate;
  CHECK(a * b < 0.0);
}
