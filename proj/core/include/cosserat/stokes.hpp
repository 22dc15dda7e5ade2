#pragma once

#include <cstddef>
#include <vector>

#include "cosserat/types.hpp"

namespace cosserat {

struct FluidParams {
  double mu = 1.0;       // dynamic viscosity
  double epsilon = 1.0;  // blob regularization radius
};

struct PointForceSet {
  std::vector<Vec3> positions;
  std::vector<Vec3> forces;
};

struct PointTorqueSet {
  std::vector<Vec3> positions;
  std::vector<Vec3> torques;
};

// Radial blob phi_eps(r) = 15 eps^4 / (8 pi (r^2+eps^2)^{7/2}), unit mass.
double blob_phi(double r, double epsilon);

// Closed forms of the kernel family generated by the blob through the radial
// Poisson reductions G'(r) = (1/r^2) int_0^r s^2 phi ds (with G -> -1/(4 pi r))
// and B'(r) = (1/r^2) int_0^r s^2 G ds (with B -> -r/(8 pi)). With
// R = sqrt(r^2 + eps^2):
//   G' = r(2r^2+5e^2)/(8 pi R^5)   G  = -(2r^2+3e^2)/(8 pi R^3)
//   B' = -r/(8 pi R)               B'' = -e^2/(8 pi R^3)
// All finite for every r >= 0.
struct BlobKernels {
  double g_prime, g, b_prime, b_dprime;
};
BlobKernels blob_kernels(double r, double epsilon);

// Pressure of the superposed regularized solutions:
//   p(x) = sum_k (f_k . d_k) G'(r_k)/r_k,  d_k = x - x_k,
// with the finite limit G'/r -> 5/(8 pi eps^3) at the source point.
double pressure_at(const Vec3& x, const PointForceSet& sources, const FluidParams& fp);

// Velocity of the superposed regularized solutions:
//   u(x) = (1/mu) sum_k [ f_k (B'/r - G) + (f_k . d_k) d_k (r B'' - B')/r^3 ]
// where the two coefficients reduce exactly to (r^2+2e^2)/(8 pi R^3) and
// 1/(8 pi R^3); both limits at r = 0 are finite.
Vec3 velocity_at(const Vec3& x, const PointForceSet& sources, const FluidParams& fp);

// Velocity of regularized torque points (same blob family):
//   u(x) = (1/(8 pi mu)) sum_k c(r_k) T_k x d_k,  c = (2r^2+5e^2)/(2 R^5),
// matching T x d / (8 pi mu r^3) in the far field and finite at r = 0.
Vec3 rodlet_velocity_at(const Vec3& x, const PointTorqueSet& sources, const FluidParams& fp);

// Local fluid angular velocity (1/2) curl u of the combined force + torque
// superposition, in closed form. Used to rotate material frames carried by
// the flow.
Vec3 angular_velocity_at(const Vec3& x, const PointForceSet& forces,
                         const PointTorqueSet& torques, const FluidParams& fp);

// Axis-aligned cubic probe lattice with n samples per axis.
struct ProbeGrid {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Ones();
  std::size_t n = 5;
};

// Central-difference divergence of velocity_at over the probe lattice.
// The continuum field is divergence free, so the result is pure truncation
// (O(h^2)) plus roundoff; max_speed supports nondimensionalization.
struct DivergenceResidual {
  double max_divergence = 0.0;
  double max_speed = 0.0;
};
DivergenceResidual divergence_residual(const PointForceSet& sources, const FluidParams& fp,
                                       const ProbeGrid& grid, double h);

// Dense 3N x 3N map from point forces to point velocities. Block (i, j) is
// H1(r_ij) I + H2(r_ij) d_ij d_ij^T over mu; every diagonal block equals
// I/(4 pi mu eps). Symmetric by construction.
MatX assemble_mobility(const std::vector<Vec3>& positions, const FluidParams& fp);

// Least-squares Krylov solve (CGLS) of M f = u. Converges when the relative
// residual reaches tol, or when the normal-equation residual indicates the
// least-squares optimum of an inconsistent (rank-deficient) system, in which
// case the attained residual is reported rather than an error. Throws
// NoConvergence after max_iter (default 10 * dim) otherwise.
struct SolveResult {
  VecX forces;
  double residual = 0.0;  // ||M f - u|| / ||u||
  std::size_t iterations = 0;
};
SolveResult solve_forces_for_velocities(const MatX& mobility, const VecX& velocities,
                                        double tol = 1e-10, std::size_t max_iter = 0);

}  // namespace cosserat
