#include "cosserat/rod.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cosserat/errors.hpp"
#include "cosserat/kinematics.hpp"

namespace cosserat {

namespace {

void check_finite(const std::vector<Vec3>& field, double time, const char* name) {
  for (const Vec3& x : field) {
    for (int c = 0; c < 3; ++c) {
      const double a = x[c];
      if (!std::isfinite(a) || std::abs(a) > kBlowupThreshold)
        throw NumericalBlowup(std::string(name) + " left the representable range at t = " +
                              std::to_string(time));
    }
  }
}

double trapezoid_weight(std::size_t i, std::size_t n) {
  return (i == 0 || i + 1 == n) ? 0.5 : 1.0;
}

}  // namespace

std::pair<std::vector<Vec3>, std::vector<Vec3>> constitutive_forces(
    const std::vector<Vec3>& kappa, const std::vector<Vec3>& nu, const RodParameters& params) {
  const std::size_t n = kappa.size();
  std::vector<Vec3> m(n), f(n);
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = params.stiffness_bend.cwiseProduct(kappa[i] - params.kappa_ref);
    f[i] = params.stiffness_shear.cwiseProduct(nu[i] - params.nu_ref);
  }
  return {std::move(m), std::move(f)};
}

std::vector<Vec3> spatial_derivative(const std::vector<Vec3>& values, double ds) {
  const std::size_t n = values.size();
  if (n < 2) throw GridTooSmall("spatial derivative needs at least 2 nodes");
  std::vector<Vec3> d(n);
  if (n == 2) {
    d[0] = d[1] = (values[1] - values[0]) / ds;
    return d;
  }
  d[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * ds);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (values[i + 1] - values[i - 1]) / (2.0 * ds);
  d[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * ds);
  return d;
}

RateDerivatives dynamic_rhs(const std::vector<Vec3>& kappa, const std::vector<Vec3>& nu,
                            const std::vector<Vec3>& omega, const std::vector<Vec3>& v,
                            const ExternalLoads& loads, const RodParameters& params) {
  const std::size_t n = kappa.size();
  auto [m, f] = constitutive_forces(kappa, nu, params);
  if (params.base == BoundaryCondition::free_end) m[0] = f[0] = Vec3::Zero();
  if (params.tip == BoundaryCondition::free_end) m[n - 1] = f[n - 1] = Vec3::Zero();

  const std::vector<Vec3> m_s = spatial_derivative(m, params.ds());
  const std::vector<Vec3> f_s = spatial_derivative(f, params.ds());

  const Vec3 j_rho = params.rho * params.inertia;
  const double a_rho = params.rho * params.area;

  RateDerivatives out;
  out.domega.resize(n);
  out.dv.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 torque = loads.torque.empty() ? Vec3::Zero() : loads.torque[i];
    const Vec3 force = loads.force.empty() ? Vec3::Zero() : loads.force[i];
    const Vec3 ang_mom = j_rho.cwiseProduct(omega[i]);
    out.domega[i] = (m_s[i] + kappa[i].cross(m[i]) + nu[i].cross(f[i]) - omega[i].cross(ang_mom) +
                     torque)
                        .cwiseQuotient(j_rho);
    out.dv[i] = (f_s[i] + kappa[i].cross(f[i]) - a_rho * omega[i].cross(v[i]) + force) / a_rho;
  }
  return out;
}

std::pair<std::vector<Vec3>, std::vector<Vec3>> strains_from_state(const RodState& state,
                                                                   const RodParameters& params) {
  const std::size_t n = state.p.size();
  std::vector<Vec3> kappa(n), nu(n);
  // Rebasing keeps each p_i inside the principal ball, so a smooth rotation
  // field can hop branches between neighbors; align the stencil to the branch
  // of the center node before differencing.
  std::vector<Vec3> p_s(n);
  const double ds = params.ds();
  if (n == 2) {
    p_s[0] = (align_rotation_vector(state.p[0], state.p[1]) - state.p[0]) / ds;
    p_s[1] = (state.p[1] - align_rotation_vector(state.p[1], state.p[0])) / ds;
  } else {
    auto at = [&](std::size_t center, std::size_t k) {
      return align_rotation_vector(state.p[center], state.p[k]);
    };
    p_s[0] = (-3.0 * state.p[0] + 4.0 * at(0, 1) - at(0, 2)) / (2.0 * ds);
    for (std::size_t i = 1; i + 1 < n; ++i) p_s[i] = (at(i, i + 1) - at(i, i - 1)) / (2.0 * ds);
    p_s[n - 1] = (3.0 * state.p[n - 1] - 4.0 * at(n - 1, n - 2) + at(n - 1, n - 3)) / (2.0 * ds);
  }
  const std::vector<Vec3> q_s = spatial_derivative(state.q, ds);
  for (std::size_t i = 0; i < n; ++i) {
    kappa[i] = body_rate_from_p(state.p[i], p_s[i]);
    nu[i] = strain_velocity_from_q(state.q[i], kappa[i], q_s[i]);
  }
  return {std::move(kappa), std::move(nu)};
}

FullState to_full_state(const RodState& state, const RodParameters& params) {
  FullState full;
  full.time = state.time;
  full.r0 = state.r0;
  auto [kappa, nu] = strains_from_state(state, params);
  full.kappa = std::move(kappa);
  full.nu = std::move(nu);
  full.omega = state.omega;
  full.v = state.v;
  return full;
}

RodState step_semi_analytical(const RodState& state, double dt, const ExternalLoads& loads,
                              const RodParameters& params) {
  const std::size_t n = state.p.size();
  auto [kappa, nu] = strains_from_state(state, params);
  const RateDerivatives rates = dynamic_rhs(kappa, nu, state.omega, state.v, loads, params);

  RodState next = state;
  next.time = state.time + dt;
  for (std::size_t i = 0; i < n; ++i) {
    next.omega[i] = state.omega[i] + dt * rates.domega[i];
    next.v[i] = state.v[i] + dt * rates.dv[i];
  }
  const bool base_clamped = params.base == BoundaryCondition::clamped;
  const bool tip_clamped = params.tip == BoundaryCondition::clamped;
  if (base_clamped) next.omega[0] = next.v[0] = Vec3::Zero();
  if (tip_clamped) next.omega[n - 1] = next.v[n - 1] = Vec3::Zero();

  for (std::size_t i = 0; i < n; ++i) {
    if ((i == 0 && base_clamped) || (i + 1 == n && tip_clamped)) continue;
    next.p[i] = rebase_rotation_vector(state.p[i] + dt * phi_inverse(next.omega[i], state.p[i]));
    next.q[i] = state.q[i] + dt * (state.q[i].cross(next.omega[i]) - next.v[i]);
  }

  check_finite(next.p, next.time, "p");
  check_finite(next.q, next.time, "q");
  check_finite(next.omega, next.time, "omega");
  check_finite(next.v, next.time, "v");
  return next;
}

FullState step_full_numeric(const FullState& state, double dt, const ExternalLoads& loads,
                            const RodParameters& params) {
  const std::size_t n = state.kappa.size();
  const double ds = params.ds();
  const RateDerivatives rates = dynamic_rhs(state.kappa, state.nu, state.omega, state.v, loads,
                                            params);
  const std::vector<Vec3> omega_s = spatial_derivative(state.omega, ds);
  const std::vector<Vec3> v_s = spatial_derivative(state.v, ds);

  FullState next = state;
  next.time = state.time + dt;
  for (std::size_t i = 0; i < n; ++i) {
    next.kappa[i] = state.kappa[i] + dt * (omega_s[i] - state.omega[i].cross(state.kappa[i]));
    next.nu[i] = state.nu[i] + dt * (v_s[i] + state.kappa[i].cross(state.v[i]) -
                                     state.omega[i].cross(state.nu[i]));
    next.omega[i] = state.omega[i] + dt * rates.domega[i];
    next.v[i] = state.v[i] + dt * rates.dv[i];
  }
  if (params.base == BoundaryCondition::clamped) next.omega[0] = next.v[0] = Vec3::Zero();
  if (params.tip == BoundaryCondition::clamped) next.omega[n - 1] = next.v[n - 1] = Vec3::Zero();

  check_finite(next.kappa, next.time, "kappa");
  check_finite(next.nu, next.time, "nu");
  check_finite(next.omega, next.time, "omega");
  check_finite(next.v, next.time, "v");
  return next;
}

Centerline reconstruct_centerline(const RodState& state, const RodParameters& params) {
  const std::size_t n = state.p.size();
  Centerline out;
  out.positions.resize(n);
  out.frames.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.frames[i] = rotation_from_p(state.p[i]);
  out.positions[0] = state.r0;
  if (n == 1) return out;

  auto [kappa, nu] = strains_from_state(state, params);
  const double ds = params.ds();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    out.positions[i + 1] = out.positions[i] + 0.5 * ds * (out.frames[i] * nu[i] +
                                                          out.frames[i + 1] * nu[i + 1]);
  }
  return out;
}

double rod_energy(const std::vector<Vec3>& kappa, const std::vector<Vec3>& nu,
                  const std::vector<Vec3>& omega, const std::vector<Vec3>& v,
                  const RodParameters& params) {
  const std::size_t n = kappa.size();
  const Vec3 j_rho = params.rho * params.inertia;
  const double a_rho = params.rho * params.area;
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 dk = kappa[i] - params.kappa_ref;
    const Vec3 dn = nu[i] - params.nu_ref;
    double density = dk.dot(params.stiffness_bend.cwiseProduct(dk)) +
                     dn.dot(params.stiffness_shear.cwiseProduct(dn)) +
                     omega[i].dot(j_rho.cwiseProduct(omega[i])) + a_rho * v[i].squaredNorm();
    e += 0.5 * trapezoid_weight(i, n) * density * params.ds();
  }
  return e;
}

double rod_energy(const RodState& state, const RodParameters& params) {
  auto [kappa, nu] = strains_from_state(state, params);
  return rod_energy(kappa, nu, state.omega, state.v, params);
}

Vec3 rod_momentum(const RodState& state, const RodParameters& params) {
  const std::size_t n = state.p.size();
  const double a_rho = params.rho * params.area;
  Vec3 mom = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i)
    mom += trapezoid_weight(i, n) * params.ds() * a_rho * (rotation_from_p(state.p[i]) * state.v[i]);
  return mom;
}

RodScenario make_bent_rod_scenario(const RodParameters& params, double bend_amplitude,
                                   int bend_mode, double hf_amplitude) {
  RodScenario sc;
  sc.params = params;
  const std::size_t n = params.n_nodes;
  sc.initial.p.assign(n, Vec3::Zero());
  sc.initial.q.assign(n, Vec3::Zero());
  sc.initial.omega.assign(n, Vec3::Zero());
  sc.initial.v.assign(n, Vec3::Zero());
  for (std::size_t i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(n - 1);
    double bend = bend_amplitude * std::sin(static_cast<double>(bend_mode) * kPi * s);
    if (hf_amplitude != 0.0 && i % 2 == 1 && i + 1 < n) bend += hf_amplitude;
    sc.initial.p[i] = Vec3(bend, 0.0, 0.0);
  }
  // q consistent with nu = nu_ref at t = 0: integrate dq/ds = q x kappa - nu_ref.
  auto [kappa, nu_unused] = strains_from_state(sc.initial, params);
  (void)nu_unused;
  const double ds = params.ds();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    // Explicit Vec3 return: a deduced type would be an Eigen expression
    // template referencing the dead cross() temporary.
    auto rhs = [&](const Vec3& q, const Vec3& kap) -> Vec3 { return q.cross(kap) - params.nu_ref; };
    const Vec3 k_mid = 0.5 * (kappa[i] + kappa[i + 1]);
    const Vec3 k1 = rhs(sc.initial.q[i], kappa[i]);
    const Vec3 k2 = rhs(sc.initial.q[i] + 0.5 * ds * k1, k_mid);
    const Vec3 k3 = rhs(sc.initial.q[i] + 0.5 * ds * k2, k_mid);
    const Vec3 k4 = rhs(sc.initial.q[i] + ds * k3, kappa[i + 1]);
    sc.initial.q[i + 1] = sc.initial.q[i] + (ds / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return sc;
}

namespace {

bool window_is_stable(StepperKind kind, const RodScenario& scenario, double dt,
                      std::size_t window_steps) {
  const double e0 = rod_energy(scenario.initial, scenario.params);
  const double bound = 10.0 * std::max(e0, 1e-30);
  try {
    if (kind == StepperKind::semi_analytical) {
      RodState s = scenario.initial;
      for (std::size_t k = 0; k < window_steps; ++k) {
        s = step_semi_analytical(s, dt, scenario.loads, scenario.params);
        if (rod_energy(s, scenario.params) >= bound) return false;
      }
    } else {
      FullState s = to_full_state(scenario.initial, scenario.params);
      for (std::size_t k = 0; k < window_steps; ++k) {
        s = step_full_numeric(s, dt, scenario.loads, scenario.params);
        if (rod_energy(s.kappa, s.nu, s.omega, s.v, scenario.params) >= bound) return false;
      }
    }
  } catch (const NumericalBlowup&) {
    return false;
  } catch (const SingularParameterization&) {
    return false;
  }
  return true;
}

}  // namespace

StableStepResult stable_step_search(StepperKind kind, const RodScenario& scenario, DtRange range,
                                    std::size_t window_steps) {
  if (!(range.lo > 0.0) || !(range.hi > range.lo))
    throw ValidationError("stable-step search needs 0 < dt_min < dt_max");

  StableStepResult out;
  auto probe = [&](double dt) {
    const bool ok = window_is_stable(kind, scenario, dt, window_steps);
    out.probes++;
    out.history.emplace_back(dt, ok);
    return ok;
  };

  if (!probe(range.lo))
    throw NoStableStep("no stable step at the lower end dt = " + std::to_string(range.lo));
  if (probe(range.hi)) {
    out.dt_max = range.hi;
    return out;
  }
  double lo = range.lo, hi = range.hi;
  while (hi / lo > 1.2) {
    const double mid = std::sqrt(lo * hi);
    if (probe(mid))
      lo = mid;
    else
      hi = mid;
  }
  out.dt_max = lo;
  return out;
}

}  // namespace cosserat
