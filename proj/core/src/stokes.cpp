#include "cosserat/stokes.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cosserat/errors.hpp"
#include "cosserat/parallel.hpp"

namespace cosserat {

namespace {

constexpr double kInv8Pi = 1.0 / (8.0 * kPi);

struct R2Powers {
  double R2, R, R3, R5;
};

R2Powers radial(double r, double eps) {
  const double R2 = r * r + eps * eps;
  const double R = std::sqrt(R2);
  return {R2, R, R2 * R, R2 * R2 * R};
}

}  // namespace

double blob_phi(double r, double epsilon) {
  const auto w = radial(r, epsilon);
  const double e2 = epsilon * epsilon;
  return 15.0 * e2 * e2 * kInv8Pi / (w.R5 * w.R2);
}

BlobKernels blob_kernels(double r, double epsilon) {
  const auto w = radial(r, epsilon);
  const double r2 = r * r;
  const double e2 = epsilon * epsilon;
  BlobKernels k;
  k.g_prime = r * (2.0 * r2 + 5.0 * e2) * kInv8Pi / w.R5;
  k.g = -(2.0 * r2 + 3.0 * e2) * kInv8Pi / w.R3;
  k.b_prime = -r * kInv8Pi / w.R;
  k.b_dprime = -e2 * kInv8Pi / w.R3;
  return k;
}

double pressure_at(const Vec3& x, const PointForceSet& sources, const FluidParams& fp) {
  const double e2 = fp.epsilon * fp.epsilon;
  double p = 0.0;
  for (std::size_t k = 0; k < sources.positions.size(); ++k) {
    const Vec3 d = x - sources.positions[k];
    const double r2 = d.squaredNorm();
    const auto w = radial(std::sqrt(r2), fp.epsilon);
    // G'(r)/r, finite limit 5/(8 pi eps^3) at r = 0.
    p += sources.forces[k].dot(d) * (2.0 * r2 + 5.0 * e2) * kInv8Pi / w.R5;
  }
  return p;
}

Vec3 velocity_at(const Vec3& x, const PointForceSet& sources, const FluidParams& fp) {
  const double e2 = fp.epsilon * fp.epsilon;
  Vec3 u = Vec3::Zero();
  for (std::size_t k = 0; k < sources.positions.size(); ++k) {
    const Vec3 d = x - sources.positions[k];
    const Vec3& f = sources.forces[k];
    const double r2 = d.squaredNorm();
    const auto w = radial(std::sqrt(r2), fp.epsilon);
    // (B'/r - G) and (r B'' - B')/r^3 in their exact simplified forms.
    const double h1 = (r2 + 2.0 * e2) * kInv8Pi / w.R3;
    const double h2 = kInv8Pi / w.R3;
    u += f * h1 + d * (f.dot(d) * h2);
  }
  return u / fp.mu;
}

Vec3 rodlet_velocity_at(const Vec3& x, const PointTorqueSet& sources, const FluidParams& fp) {
  const double e2 = fp.epsilon * fp.epsilon;
  Vec3 u = Vec3::Zero();
  for (std::size_t k = 0; k < sources.positions.size(); ++k) {
    const Vec3 d = x - sources.positions[k];
    const double r2 = d.squaredNorm();
    const auto w = radial(std::sqrt(r2), fp.epsilon);
    const double c = (2.0 * r2 + 5.0 * e2) / (2.0 * w.R5);
    u += c * sources.torques[k].cross(d);
  }
  return u * (kInv8Pi / fp.mu);
}

Vec3 angular_velocity_at(const Vec3& x, const PointForceSet& forces,
                         const PointTorqueSet& torques, const FluidParams& fp) {
  const double e2 = fp.epsilon * fp.epsilon;
  Vec3 curl = Vec3::Zero();
  for (std::size_t k = 0; k < forces.positions.size(); ++k) {
    const Vec3 d = x - forces.positions[k];
    const double r2 = d.squaredNorm();
    const auto w = radial(std::sqrt(r2), fp.epsilon);
    // curl of the force kernel: (f x d) (2r^2+5e^2)/(8 pi R^5).
    curl += forces.forces[k].cross(d) * ((2.0 * r2 + 5.0 * e2) * kInv8Pi / w.R5);
  }
  for (std::size_t k = 0; k < torques.positions.size(); ++k) {
    const Vec3 d = x - torques.positions[k];
    const Vec3& t = torques.torques[k];
    const double r2 = d.squaredNorm();
    const auto w = radial(std::sqrt(r2), fp.epsilon);
    const double R7 = w.R5 * w.R2;
    const double c = (2.0 * r2 + 5.0 * e2) / (2.0 * w.R5);
    const double cp_over_r = -3.0 * (2.0 * r2 + 7.0 * e2) / (2.0 * R7);
    // curl of the torque kernel: (2c + r c') T - (c'/r)(T . d) d.
    curl += kInv8Pi * ((2.0 * c + r2 * cp_over_r) * t - cp_over_r * t.dot(d) * d);
  }
  return 0.5 * curl / fp.mu;
}

DivergenceResidual divergence_residual(const PointForceSet& sources, const FluidParams& fp,
                                       const ProbeGrid& grid, double h) {
  if (grid.n < 1) throw ValidationError("probe grid needs at least one sample per axis");
  if (!(h > 0.0)) throw ValidationError("divergence step h must be positive");

  const std::size_t n = grid.n;
  auto coord = [&](std::size_t k, int axis) {
    if (n == 1) return 0.5 * (grid.lo[axis] + grid.hi[axis]);
    return grid.lo[axis] +
           (grid.hi[axis] - grid.lo[axis]) * static_cast<double>(k) / static_cast<double>(n - 1);
  };

  std::vector<double> worst_div(n, 0.0), worst_speed(n, 0.0);
  parallel_for(n, [&](std::size_t ib, std::size_t ie) {
    for (std::size_t i = ib; i < ie; ++i) {
      double wd = 0.0, ws = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
          const Vec3 x(coord(i, 0), coord(j, 1), coord(k, 2));
          double div = 0.0;
          for (int axis = 0; axis < 3; ++axis) {
            Vec3 e = Vec3::Zero();
            e[axis] = h;
            div += (velocity_at(x + e, sources, fp)[axis] -
                    velocity_at(x - e, sources, fp)[axis]) /
                   (2.0 * h);
          }
          wd = std::max(wd, std::abs(div));
          ws = std::max(ws, velocity_at(x, sources, fp).norm());
        }
      }
      worst_div[i] = wd;
      worst_speed[i] = ws;
    }
  });
  DivergenceResidual out;
  out.max_divergence = *std::max_element(worst_div.begin(), worst_div.end());
  out.max_speed = *std::max_element(worst_speed.begin(), worst_speed.end());
  return out;
}

MatX assemble_mobility(const std::vector<Vec3>& positions, const FluidParams& fp) {
  const std::size_t n = positions.size();
  const double e2 = fp.epsilon * fp.epsilon;
  MatX m(3 * n, 3 * n);
  parallel_for(n, [&](std::size_t ib, std::size_t ie) {
    for (std::size_t i = ib; i < ie; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const Vec3 d = positions[i] - positions[j];
        const double r2 = d.squaredNorm();
        const auto w = radial(std::sqrt(r2), fp.epsilon);
        const double h1 = (r2 + 2.0 * e2) * kInv8Pi / w.R3;
        const double h2 = kInv8Pi / w.R3;
        m.block<3, 3>(3 * static_cast<long>(i), 3 * static_cast<long>(j)) =
            (h1 * Mat3::Identity() + h2 * (d * d.transpose())) / fp.mu;
      }
    }
  });
  return m;
}

SolveResult solve_forces_for_velocities(const MatX& mobility, const VecX& velocities, double tol,
                                        std::size_t max_iter) {
  const long dim = mobility.rows();
  if (mobility.cols() != dim || velocities.size() != dim)
    throw ValidationError("mobility solve needs a square matrix matching the velocity vector");
  if (max_iter == 0) max_iter = 10 * static_cast<std::size_t>(dim);

  SolveResult out;
  out.forces = VecX::Zero(dim);
  const double b_norm = velocities.norm();
  if (b_norm == 0.0) return out;

  // CGLS on min ||M f - u||. The normal equations M^T M f = M^T u are always
  // consistent, so the loop converges even for exactly singular M; the
  // secondary test detects the least-squares optimum of inconsistent data.
  const double m_norm = mobility.norm();
  VecX r = velocities;
  VecX s = mobility.transpose() * r;
  VecX p = s;
  double gamma = s.squaredNorm();

  for (std::size_t it = 1; it <= max_iter; ++it) {
    const VecX q = mobility * p;
    const double qq = q.squaredNorm();
    if (qq == 0.0) break;
    const double alpha = gamma / qq;
    out.forces += alpha * p;
    r -= alpha * q;
    out.iterations = it;
    s.noalias() = mobility.transpose() * r;
    const double gamma_next = s.squaredNorm();
    const double rel = r.norm() / b_norm;
    if (rel <= tol || std::sqrt(gamma_next) <= tol * m_norm * std::max(r.norm(), b_norm)) {
      out.residual = rel;
      return out;
    }
    p = s + (gamma_next / gamma) * p;
    gamma = gamma_next;
  }
  out.residual = (mobility * out.forces - velocities).norm() / b_norm;
  if (out.residual > tol)
    throw NoConvergence("mobility solve stalled at relative residual " +
                        std::to_string(out.residual) + " after " + std::to_string(out.iterations) +
                        " iterations");
  return out;
}

}  // namespace cosserat
