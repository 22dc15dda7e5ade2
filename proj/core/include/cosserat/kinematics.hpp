#pragma once

#include "cosserat/grid.hpp"
#include "cosserat/types.hpp"

namespace cosserat {

// Default singularity guard on |jacobian_det|.
inline constexpr double kSingularGuard = 1e-8;

// Coefficient map A(p) relating parameter rates to body rates:
//   rate = A(p) * dp,   A(p) = I + c3(||p||)(p p^T - ||p||^2 I) - c2(||p||)[p]x
// with c2 = (1-cos n)/n^2, c3 = (n-sin n)/n^3. Equals the identity at p = 0.
// Coefficients switch to 4-term Taylor expansions below ||p|| = 1e-4.
Mat3 dexp_matrix(const RotationVector& p);

// Body rate induced by a parameter rate: dexp_matrix(p) * dp.
// With dp = d p/dt this is the twist vector omega; with dp = d p/ds it is
// the Darboux vector kappa (one map serves both directions).
Vec3 body_rate_from_p(const RotationVector& p, const Vec3& dp);

// Determinant of the rate map in the signed closed form 2(cos||p|| - 1)/||p||^2.
// Lies in [-1, 0] and vanishes exactly at ||p|| = 2*pi*k; |jacobian_det| equals
// det(dexp_matrix(p)), whose sign is positive (the product of the paired
// complex eigenvalues sin^2 n + (1-cos n)^2 over n^2).
double jacobian_det(const RotationVector& p);

// Inverse rate map: solves dexp_matrix(p) * dp = rate by a direct 3x3 LU solve.
// Throws SingularParameterization when |jacobian_det(p)| <= eps_sing.
Vec3 phi_inverse(const Vec3& rate, const RotationVector& p,
                 double eps_sing = kSingularGuard);

// Director frame R = I + (sin n / n)[p]x + ((1-cos n)/n^2)[p]x^2, n = ||p||.
// Columns are the directors d1, d2, d3 expressed in the fixed frame.
Mat3 rotation_from_p(const RotationVector& p);

// Second half of the solution family: nu = q x kappa - dq/ds and
// v = q x omega - dq/dt share this one formula (pass the matching rate and
// derivative of q).
Vec3 strain_velocity_from_q(const Vec3& q, const Vec3& rate, const Vec3& dq);

// Shortens ||p|| > pi by the equivalent representative p(1 - 2*pi/||p||),
// leaving rotation_from_p(p) unchanged. Identity for ||p|| <= pi.
RotationVector rebase_rotation_vector(const RotationVector& p);

// Representative of p (among p(1 + 2*pi*k/||p||), k in {-1, 0, 1}) nearest to
// ref. Difference stencils across rebased fields must align neighbors to one
// branch first; otherwise the 2*pi jumps leak into the derivatives.
RotationVector align_rotation_vector(const RotationVector& ref, const RotationVector& p);

// Compatibility residuals of sampled rate fields:
//   h1 = d kappa/dt - d omega/ds + omega x kappa
//   h2 = d nu/dt    - d v/ds     - kappa x v + omega x nu
// Derivatives use second-order central stencils, one-sided at edges.
// Both vanish identically for fields produced by body_rate_from_p /
// strain_velocity_from_q from any smooth (p, q).
struct ResidualFields {
  Field3 h1, h2;
  double max_h1 = 0.0;  // max over nodes of ||h1||_inf
  double max_h2 = 0.0;
};
ResidualFields kinematic_residuals(const KinematicFields& fields);

struct RecoverOptions {
  double eps_sing = kSingularGuard;
  // Cross-path integration mismatch (rotation Frobenius distance for p,
  // max-norm for q) above which the fields are declared incompatible.
  double consistency_tol = 1e-3;
};

// (p, q) fields recovered from rate fields by marching the inverse system
//   dp/ds = phi_inverse(kappa, p), dp/dt = phi_inverse(omega, p),
//   dq/ds = q x kappa - nu,        dq/dt = q x omega - v
// along t = t_min and then along t at each s (classical RK4, cubic
// interpolation of the rate fields at stage points, rebase between steps).
// rms_* report the round trip through body_rate_from_p /
// strain_velocity_from_q with fourth-order finite differences of the
// recovered fields; they are meaningful while the recovered p stays inside
// the principal ball ||p|| <= pi (no rebase jumps in the difference stencils).
struct RecoveredParameterization {
  Field3 p, q;
  double rms_omega = 0.0, rms_kappa = 0.0, rms_nu = 0.0, rms_v = 0.0;
  double rms_total = 0.0;
};
RecoveredParameterization recover_parameterization(const KinematicFields& fields,
                                                   const RotationVector& p0,
                                                   const Vec3& q0,
                                                   const RecoverOptions& opts = {});

}  // namespace cosserat
