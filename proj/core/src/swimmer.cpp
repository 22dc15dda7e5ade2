#include "cosserat/swimmer.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "cosserat/errors.hpp"
#include "cosserat/kinematics.hpp"

namespace cosserat {

namespace {

double trapezoid_weight(std::size_t i, std::size_t n) {
  return (i == 0 || i + 1 == n) ? 0.5 : 1.0;
}

// Body-frame elastic load densities with free-end ghosts applied per the
// configured boundary conditions: f = dn/ds + kappa x n, l = dm/ds +
// kappa x m + nu x n.
struct ElasticLoads {
  std::vector<Vec3> force, torque;
};

ElasticLoads elastic_load_densities(const std::vector<Vec3>& kappa, const std::vector<Vec3>& nu,
                                    const RodParameters& params) {
  const std::size_t n = kappa.size();
  auto [m, f] = constitutive_forces(kappa, nu, params);
  if (params.base == BoundaryCondition::free_end) m[0] = f[0] = Vec3::Zero();
  if (params.tip == BoundaryCondition::free_end) m[n - 1] = f[n - 1] = Vec3::Zero();
  const std::vector<Vec3> m_s = spatial_derivative(m, params.ds());
  const std::vector<Vec3> f_s = spatial_derivative(f, params.ds());
  ElasticLoads out;
  out.force.resize(n);
  out.torque.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.force[i] = f_s[i] + kappa[i].cross(f[i]);
    out.torque[i] = m_s[i] + kappa[i].cross(m[i]) + nu[i].cross(f[i]);
  }
  return out;
}

void check_state_finite(const RodState& s) {
  auto scan = [&](const std::vector<Vec3>& field, const char* name) {
    for (const Vec3& x : field)
      for (int c = 0; c < 3; ++c)
        if (!std::isfinite(x[c]) || std::abs(x[c]) > kBlowupThreshold)
          throw NumericalBlowup(std::string(name) + " left the representable range at t = " +
                                std::to_string(s.time));
  };
  scan(s.p, "p");
  scan(s.q, "q");
  scan(s.omega, "omega");
  scan(s.v, "v");
  for (int c = 0; c < 3; ++c)
    if (!std::isfinite(s.r0[c]) || std::abs(s.r0[c]) > kBlowupThreshold)
      throw NumericalBlowup("base position left the representable range");
}

RodState overdamped_step(const RodState& state, const SwimmerConfig& config, double dt) {
  const RodParameters& rod = config.rod;
  const std::size_t n = rod.n_nodes;
  const double ds = rod.ds();

  auto [kappa, nu] = strains_from_state(state, rod);
  const ElasticLoads elastic = elastic_load_densities(kappa, nu, rod);
  const Centerline line = reconstruct_centerline(state, rod);

  PointForceSet forces;
  PointTorqueSet torques;
  forces.positions = line.positions;
  torques.positions = line.positions;
  forces.forces.resize(n);
  torques.torques.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = trapezoid_weight(i, n) * ds;
    forces.forces[i] = line.frames[i] * (w * elastic.force[i]);
    torques.torques[i] = line.frames[i] * (w * elastic.torque[i]);
  }
  const Vec3 motor = motor_torque(config, line.frames[0]);
  torques.torques[0] += motor;

  PointTorqueSet head;
  FluidParams head_fp{config.fluid.mu, config.head_epsilon};
  if (config.head_epsilon > 0.0) {
    head.positions.push_back(line.positions[0]);
    head.torques.push_back(-motor);  // motor reaction: free swimmer, zero net torque
  }

  RodState next = state;
  next.time = state.time + dt;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& x = line.positions[i];
    Vec3 u = velocity_at(x, forces, config.fluid) + rodlet_velocity_at(x, torques, config.fluid);
    Vec3 w_fluid = angular_velocity_at(x, forces, torques, config.fluid);
    if (!head.positions.empty()) {
      u += rodlet_velocity_at(x, head, head_fp);
      w_fluid += angular_velocity_at(x, PointForceSet{}, head, head_fp);
    }
    const Vec3 omega_body = line.frames[i].transpose() * w_fluid;
    const Vec3 v_body = line.frames[i].transpose() * u;
    next.omega[i] = omega_body;
    next.v[i] = v_body;
    next.p[i] = rebase_rotation_vector(state.p[i] + dt * phi_inverse(omega_body, state.p[i]));
    next.q[i] = state.q[i] + dt * (state.q[i].cross(omega_body) - v_body);
    if (i == 0) next.r0 = state.r0 + dt * u;
  }
  check_state_finite(next);
  return next;
}

RodState inertial_step(const RodState& state, const SwimmerConfig& config, double dt) {
  const RodParameters& rod = config.rod;
  const std::size_t n = rod.n_nodes;
  const double ds = rod.ds();
  const Centerline line = reconstruct_centerline(state, rod);

  VecX u(3 * n);
  for (std::size_t i = 0; i < n; ++i)
    u.segment<3>(3 * static_cast<long>(i)) = line.frames[i] * state.v[i];

  const MatX mobility = assemble_mobility(line.positions, config.fluid);
  const SolveResult solve = solve_forces_for_velocities(mobility, u);

  ExternalLoads loads;
  loads.force.resize(n);
  loads.torque.assign(n, Vec3::Zero());
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 f_fluid = solve.forces.segment<3>(3 * static_cast<long>(i));
    const double w = trapezoid_weight(i, n) * ds;
    loads.force[i] = line.frames[i].transpose() * (-f_fluid) / w;  // drag density, body frame
  }
  const Vec3 motor = motor_torque(config, line.frames[0]);
  loads.torque[0] = line.frames[0].transpose() * motor / (trapezoid_weight(0, n) * ds);

  return step_semi_analytical(state, dt, loads, rod);
}

}  // namespace

RodState init_swimmer(const RodParameters& params) {
  const std::size_t n = params.n_nodes;
  RodState s;
  s.p.resize(n);
  s.q.resize(n);
  s.omega.assign(n, Vec3::Zero());
  s.v.assign(n, Vec3::Zero());
  for (std::size_t i = 0; i < n; ++i) {
    const double si = static_cast<double>(i) * params.ds();
    Vec3 p = si * params.kappa_ref;
    while (p.norm() > kPi) p = rebase_rotation_vector(p);
    s.p[i] = p;
    // Exact: integral of the frame along the rod collapses to the rate map.
    s.q[i] = -si * (dexp_matrix(si * params.kappa_ref) * params.nu_ref);
  }
  return s;
}

Vec3 motor_torque(const SwimmerConfig& config, const Mat3& base_frame) {
  const Vec3 heading = base_frame.col(2);
  const double scale =
      std::clamp(1.0 + config.chemotaxis_gain * config.gradient.dot(heading), 0.0, 2.0);
  return (config.motor_torque * scale) * heading;
}

RodState coupled_step(const RodState& state, const SwimmerConfig& config, double dt) {
  return config.mode == CouplingMode::overdamped ? overdamped_step(state, config, dt)
                                                 : inertial_step(state, config, dt);
}

SimulationTrace run_simulation(const SwimmerConfig& config, const RodState& initial, double dt,
                               std::size_t n_steps, std::size_t stride) {
  if (stride == 0) throw ValidationError("stride must be >= 1");
  SimulationTrace trace;
  trace.dt = dt;
  trace.stride = stride;
  trace.motor_torque_nominal = config.motor_torque;

  RodState state = initial;
  auto record = [&](std::size_t step) {
    TraceFrame f;
    f.step = step;
    f.time = state.time;
    f.positions = reconstruct_centerline(state, config.rod).positions;
    f.p = state.p;
    f.q = state.q;
    trace.frames.push_back(std::move(f));
  };
  record(0);
  for (std::size_t step = 1; step <= n_steps; ++step) {
    try {
      state = coupled_step(state, config, dt);
    } catch (const Error& err) {
      trace.status = err.what();
      return trace;
    }
    if (step % stride == 0 || step == n_steps) record(step);
  }
  return trace;
}

SwimMetrics trace_metrics(const SimulationTrace& trace) {
  if (trace.frames.size() < 2) throw EmptyTrace("metrics need at least two recorded frames");
  const TraceFrame& first = trace.frames.front();
  const TraceFrame& last = trace.frames.back();
  const double elapsed = last.time - first.time;
  if (!(elapsed > 0.0)) throw EmptyTrace("metrics need a positive time span");

  SwimMetrics m;
  m.displacement = last.positions[0] - first.positions[0];
  m.mean_speed = m.displacement.norm() / elapsed;

  double roll = 0.0;
  for (std::size_t k = 0; k + 1 < trace.frames.size(); ++k) {
    const Mat3 a = rotation_from_p(trace.frames[k].p[0]);
    const Mat3 b = rotation_from_p(trace.frames[k + 1].p[0]);
    const Vec3 d1_next = b.col(0);
    roll += std::atan2(d1_next.dot(a.col(1)), d1_next.dot(a.col(0)));
  }
  m.base_roll_rate = roll / elapsed;
  m.efficiency = trace.motor_torque_nominal != 0.0
                     ? m.mean_speed / std::abs(trace.motor_torque_nominal)
                     : 0.0;
  return m;
}

}  // namespace cosserat
