#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "cosserat/types.hpp"

namespace cosserat {

enum class BoundaryCondition { clamped, free_end };

// Physical and discretization parameters of one rod. Stiffness and inertia
// tensors are diagonal in the director frame (Kirchhoff-type linear law).
struct RodParameters {
  std::size_t n_nodes = 2;
  double length = 1.0;
  double rho = 1.0;              // mass density
  double area = 1.0;             // cross-section area (rho*area = line mass)
  Vec3 inertia = Vec3::Ones();   // rotary inertia diagonal of J
  Vec3 stiffness_bend = Vec3::Ones();   // bending(1,2) and twist(3) moduli
  Vec3 stiffness_shear = Vec3::Ones();  // shear(1,2) and extension(3) moduli
  Vec3 kappa_ref = Vec3::Zero();        // intrinsic curvature/twist
  Vec3 nu_ref = Vec3(0.0, 0.0, 1.0);    // intrinsic strain (unit extension)
  BoundaryCondition base = BoundaryCondition::clamped;
  BoundaryCondition tip = BoundaryCondition::free_end;

  double ds() const { return length / static_cast<double>(n_nodes - 1); }
};

// Semi-analytical state: the parameterization (p, q) is the single source of
// truth for strains; omega, v are the body-frame rate fields.
struct RodState {
  double time = 0.0;
  Vec3 r0 = Vec3::Zero();  // base node position in the fixed frame
  std::vector<Vec3> p, q, omega, v;
};

// Baseline state carrying all four rate fields independently.
struct FullState {
  double time = 0.0;
  Vec3 r0 = Vec3::Zero();
  std::vector<Vec3> kappa, nu, omega, v;
};

// External load densities per node, body frame. Empty vectors mean zero.
struct ExternalLoads {
  std::vector<Vec3> force, torque;
};

// Any state component beyond this magnitude (or non-finite) aborts a step.
inline constexpr double kBlowupThreshold = 1e12;

// Internal torque m = K_bend .* (kappa - kappa_ref) and force
// n = K_shear .* (nu - nu_ref), per node, body frame.
std::pair<std::vector<Vec3>, std::vector<Vec3>> constitutive_forces(
    const std::vector<Vec3>& kappa, const std::vector<Vec3>& nu, const RodParameters& params);

// Second-order first derivative along the rod: central inside, one-sided
// three-point at the ends (two-point when only two nodes exist).
std::vector<Vec3> spatial_derivative(const std::vector<Vec3>& values, double ds);

// Angular/linear acceleration fields of the governing balance laws:
//   J_rho * domega = d m/ds + kappa x m + nu x n - omega x (J_rho omega) + torque
//   a_rho * dv     = d n/ds + kappa x n          - omega x (a_rho v)     + force
// with J_rho = rho*inertia (diagonal), a_rho = rho*area. A free end imposes
// m = n = 0 at that node before differentiating.
struct RateDerivatives {
  std::vector<Vec3> domega, dv;
};
RateDerivatives dynamic_rhs(const std::vector<Vec3>& kappa, const std::vector<Vec3>& nu,
                            const std::vector<Vec3>& omega, const std::vector<Vec3>& v,
                            const ExternalLoads& loads, const RodParameters& params);

// One semi-analytical step: strains are recomputed from (p, q), the dynamic
// balance advances (omega, v) by forward Euler, then (p, q) advance with the
// *updated* rates via the inverse rate map and q_t = q x omega - v. Rotation
// vectors are rebased when they leave the principal ball. Clamped nodes hold
// (p, q) and zero rates. Throws NumericalBlowup past kBlowupThreshold.
RodState step_semi_analytical(const RodState& state, double dt, const ExternalLoads& loads,
                              const RodParameters& params);

// Baseline: forward Euler on all twelve fields, with the strain transport
//   d kappa/dt = d omega/ds - omega x kappa
//   d nu/dt    = d v/ds + kappa x v - omega x nu
// discretized by the same stencils. Compatibility of (kappa, nu) with any
// underlying parameterization is only approximate and drifts.
FullState step_full_numeric(const FullState& state, double dt, const ExternalLoads& loads,
                            const RodParameters& params);

// Frames and node positions from the parameterization: D_i = rotation_from_p,
// tangent integrated by the trapezoid rule r_{i+1} = r_i + ds/2 (D_i nu_i +
// D_{i+1} nu_{i+1}).
struct Centerline {
  std::vector<Vec3> positions;
  std::vector<Mat3> frames;
};
Centerline reconstruct_centerline(const RodState& state, const RodParameters& params);

// Strain fields derived from (p, q); used to hand a semi-analytical state to
// the baseline stepper and by the energy functional.
std::pair<std::vector<Vec3>, std::vector<Vec3>> strains_from_state(const RodState& state,
                                                                   const RodParameters& params);
FullState to_full_state(const RodState& state, const RodParameters& params);

// Elastic + kinetic energy, trapezoid weights along the rod.
double rod_energy(const std::vector<Vec3>& kappa, const std::vector<Vec3>& nu,
                  const std::vector<Vec3>& omega, const std::vector<Vec3>& v,
                  const RodParameters& params);
double rod_energy(const RodState& state, const RodParameters& params);

// Total linear momentum in the fixed frame (trapezoid weights).
Vec3 rod_momentum(const RodState& state, const RodParameters& params);

// A rod plus the loads and initial state that define a stepping experiment.
struct RodScenario {
  RodParameters params;
  RodState initial;
  ExternalLoads loads;
};

// Straight reference rod bent by a smooth transverse mode (plus an optional
// node-scale component), at rest. Base clamped, tip free.
RodScenario make_bent_rod_scenario(const RodParameters& params, double bend_amplitude,
                                   int bend_mode, double hf_amplitude = 0.0);

enum class StepperKind { semi_analytical, full_numeric };

struct DtRange {
  double lo = 0.0, hi = 0.0;
};

// Largest stable dt located by bisection on log(dt). A dt is stable when
// window_steps steps complete without NumericalBlowup (or a singular rate
// map) and the energy never reaches 10x its initial value. The result is
// exact within a factor 1.2. Throws NoStableStep when even range.lo fails.
struct StableStepResult {
  double dt_max = 0.0;
  std::size_t probes = 0;
  std::vector<std::pair<double, bool>> history;  // (dt, stable) in probe order
};
StableStepResult stable_step_search(StepperKind kind, const RodScenario& scenario, DtRange range,
                                    std::size_t window_steps = 1000);

}  // namespace cosserat
