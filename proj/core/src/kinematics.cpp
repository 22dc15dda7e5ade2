#include "cosserat/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "cosserat/errors.hpp"
#include "cosserat/parallel.hpp"

namespace cosserat {

namespace {

constexpr double kTaylorSwitch = 1e-4;

// (1 - cos n)/n^2
double coef_versine(double n) {
  if (n < kTaylorSwitch) {
    const double n2 = n * n;
    return 0.5 - n2 / 24.0 + n2 * n2 / 720.0 - n2 * n2 * n2 / 40320.0;
  }
  return (1.0 - std::cos(n)) / (n * n);
}

// (n - sin n)/n^3
double coef_cubic(double n) {
  if (n < kTaylorSwitch) {
    const double n2 = n * n;
    return 1.0 / 6.0 - n2 / 120.0 + n2 * n2 / 5040.0 - n2 * n2 * n2 / 362880.0;
  }
  return (n - std::sin(n)) / (n * n * n);
}

// sin(n)/n
double coef_sinc(double n) {
  if (n < kTaylorSwitch) {
    const double n2 = n * n;
    return 1.0 - n2 / 6.0 + n2 * n2 / 120.0 - n2 * n2 * n2 / 5040.0;
  }
  return std::sin(n) / n;
}

}  // namespace

Mat3 dexp_matrix(const RotationVector& p) {
  const double n = p.norm();
  const double c2 = coef_versine(n);
  const double c3 = coef_cubic(n);
  return Mat3::Identity() + c3 * (p * p.transpose() - n * n * Mat3::Identity()) - c2 * skew(p);
}

Vec3 body_rate_from_p(const RotationVector& p, const Vec3& dp) {
  const double n = p.norm();
  const double c2 = coef_versine(n);
  const double c3 = coef_cubic(n);
  return dp + c3 * (p * p.dot(dp) - n * n * dp) - c2 * p.cross(dp);
}

double jacobian_det(const RotationVector& p) {
  return -2.0 * coef_versine(p.norm());
}

Vec3 phi_inverse(const Vec3& rate, const RotationVector& p, double eps_sing) {
  const double det = jacobian_det(p);
  if (std::abs(det) <= eps_sing)
    throw SingularParameterization("rate map singular at ||p|| = " + std::to_string(p.norm()) +
                                   " (|det| = " + std::to_string(std::abs(det)) + ")");
  return dexp_matrix(p).partialPivLu().solve(rate);
}

Mat3 rotation_from_p(const RotationVector& p) {
  const double n = p.norm();
  const Mat3 k = skew(p);
  return Mat3::Identity() + coef_sinc(n) * k + coef_versine(n) * k * k;
}

Vec3 strain_velocity_from_q(const Vec3& q, const Vec3& rate, const Vec3& dq) {
  return q.cross(rate) - dq;
}

RotationVector rebase_rotation_vector(const RotationVector& p) {
  const double n = p.norm();
  if (n <= kPi) return p;
  return p * (1.0 - 2.0 * kPi / n);
}

RotationVector align_rotation_vector(const RotationVector& ref, const RotationVector& p) {
  const double n = p.norm();
  if (n == 0.0) return p;
  RotationVector best = p;
  double best_dist = (p - ref).squaredNorm();
  for (int k : {-1, 1}) {
    const RotationVector cand = p * (1.0 + 2.0 * kPi * k / n);
    const double dist = (cand - ref).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = cand;
    }
  }
  return best;
}

namespace {

// Second-order first derivative along one grid line: central inside,
// one-sided three-point at the ends.
Vec3 d1_order2(const std::function<const Vec3&(std::size_t)>& f, std::size_t m, std::size_t k,
               double h) {
  if (k == 0) return (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h);
  if (k == m - 1) return (3.0 * f(m - 1) - 4.0 * f(m - 2) + f(m - 3)) / (2.0 * h);
  return (f(k + 1) - f(k - 1)) / (2.0 * h);
}

// Fourth-order first derivative (five-point stencils); falls back to the
// second-order stencils when the line is shorter than five nodes.
Vec3 d1_order4(const std::function<const Vec3&(std::size_t)>& f, std::size_t m, std::size_t k,
               double h) {
  if (m < 5) return d1_order2(f, m, k, h);
  const double s = 1.0 / (12.0 * h);
  if (k == 0) return s * (-25.0 * f(0) + 48.0 * f(1) - 36.0 * f(2) + 16.0 * f(3) - 3.0 * f(4));
  if (k == 1) return s * (-3.0 * f(0) - 10.0 * f(1) + 18.0 * f(2) - 6.0 * f(3) + f(4));
  if (k == m - 2)
    return -s * (-3.0 * f(m - 1) - 10.0 * f(m - 2) + 18.0 * f(m - 3) - 6.0 * f(m - 4) + f(m - 5));
  if (k == m - 1)
    return -s * (-25.0 * f(m - 1) + 48.0 * f(m - 2) - 36.0 * f(m - 3) + 16.0 * f(m - 4) -
                 3.0 * f(m - 5));
  return s * (f(k - 2) - 8.0 * f(k - 1) + 8.0 * f(k + 1) - f(k + 2));
}

}  // namespace

ResidualFields kinematic_residuals(const KinematicFields& fields) {
  const GridSpec& g = fields.grid;
  g.validate();
  if (g.n_s < 3 || g.n_t < 3)
    throw GridTooSmall("residual stencils need at least 3 nodes per axis, got " +
                       std::to_string(g.n_s) + " x " + std::to_string(g.n_t));

  ResidualFields out;
  out.h1 = Field3(g.n_s, g.n_t);
  out.h2 = Field3(g.n_s, g.n_t);

  const double ds = g.ds(), dt = g.dt();
  const std::size_t workers = std::max<std::size_t>(1, worker_count());
  std::vector<double> chunk_max_h1(g.n_s, 0.0), chunk_max_h2(g.n_s, 0.0);

  parallel_for(g.n_s, [&](std::size_t ib, std::size_t ie) {
    for (std::size_t i = ib; i < ie; ++i) {
      double row_h1 = 0.0, row_h2 = 0.0;
      for (std::size_t j = 0; j < g.n_t; ++j) {
        auto along_s = [&](const Field3& f) {
          return d1_order2([&](std::size_t k) -> const Vec3& { return f(k, j); }, g.n_s, i, ds);
        };
        auto along_t = [&](const Field3& f) {
          return d1_order2([&](std::size_t k) -> const Vec3& { return f(i, k); }, g.n_t, j, dt);
        };
        const Vec3& w = fields.omega(i, j);
        const Vec3& ka = fields.kappa(i, j);
        const Vec3& nu = fields.nu(i, j);
        const Vec3& v = fields.v(i, j);
        const Vec3 h1 = along_t(fields.kappa) - along_s(fields.omega) + w.cross(ka);
        const Vec3 h2 = along_t(fields.nu) - along_s(fields.v) - ka.cross(v) + w.cross(nu);
        out.h1(i, j) = h1;
        out.h2(i, j) = h2;
        row_h1 = std::max(row_h1, h1.cwiseAbs().maxCoeff());
        row_h2 = std::max(row_h2, h2.cwiseAbs().maxCoeff());
      }
      chunk_max_h1[i] = row_h1;
      chunk_max_h2[i] = row_h2;
    }
  });
  (void)workers;
  out.max_h1 = *std::max_element(chunk_max_h1.begin(), chunk_max_h1.end());
  out.max_h2 = *std::max_element(chunk_max_h2.begin(), chunk_max_h2.end());
  return out;
}

namespace {

// Lagrange interpolation at fractional index xi on the (up to) four nearest
// nodes of a grid line.
Vec3 interp_line(const std::function<const Vec3&(std::size_t)>& f, std::size_t m, double xi) {
  const std::size_t w = std::min<std::size_t>(4, m);
  long base = static_cast<long>(std::floor(xi)) - static_cast<long>(w / 2 - 1);
  base = std::clamp<long>(base, 0, static_cast<long>(m - w));
  Vec3 acc = Vec3::Zero();
  for (std::size_t a = 0; a < w; ++a) {
    const double xa = static_cast<double>(base) + static_cast<double>(a);
    double weight = 1.0;
    for (std::size_t b = 0; b < w; ++b) {
      if (b == a) continue;
      const double xb = static_cast<double>(base) + static_cast<double>(b);
      weight *= (xi - xb) / (xa - xb);
    }
    acc += weight * f(static_cast<std::size_t>(base) + a);
  }
  return acc;
}

struct LineSampler {
  std::function<const Vec3&(std::size_t)> f;
  std::size_t m;
  double h;
  Vec3 operator()(double x) const { return interp_line(f, m, x / h); }
};

// One classical RK4 step of y' = rhs(x, y).
template <typename Rhs>
Vec3 rk4_step(const Rhs& rhs, double x, const Vec3& y, double h) {
  const Vec3 k1 = rhs(x, y);
  const Vec3 k2 = rhs(x + 0.5 * h, y + 0.5 * h * k1);
  const Vec3 k3 = rhs(x + 0.5 * h, y + 0.5 * h * k2);
  const Vec3 k4 = rhs(x + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

RecoveredParameterization recover_parameterization(const KinematicFields& fields,
                                                   const RotationVector& p0, const Vec3& q0,
                                                   const RecoverOptions& opts) {
  const GridSpec& g = fields.grid;
  g.validate();
  const double ds = g.ds(), dt = g.dt();

  RecoveredParameterization out;
  out.p = Field3(g.n_s, g.n_t);
  out.q = Field3(g.n_s, g.n_t);

  // Explicit Vec3 returns: a deduced return type here would be an Eigen
  // expression template referencing dead temporaries.
  auto p_rhs = [&opts](const LineSampler& rate) {
    return [rate, &opts](double x, const Vec3& p) -> Vec3 {
      return phi_inverse(rate(x), p, opts.eps_sing);
    };
  };
  auto q_rhs = [](const LineSampler& rate, const LineSampler& strain) {
    return [rate, strain](double x, const Vec3& q) -> Vec3 {
      return q.cross(rate(x)) - strain(x);
    };
  };

  // March a (p, q) pair along one grid line, writing every node.
  auto march = [&](const LineSampler& rate, const LineSampler& strain, double h, std::size_t m,
                   Vec3 p, Vec3 q, const std::function<void(std::size_t, const Vec3&, const Vec3&)>& sink) {
    sink(0, p, q);
    auto rp = p_rhs(rate);
    auto rq = q_rhs(rate, strain);
    for (std::size_t k = 0; k + 1 < m; ++k) {
      const double x = static_cast<double>(k) * h;
      q = rk4_step(rq, x, q, h);
      p = rk4_step(rp, x, p, h);
      p = rebase_rotation_vector(p);
      sink(k + 1, p, q);
    }
  };

  // Along s at t = t_min.
  {
    LineSampler kap{[&](std::size_t k) -> const Vec3& { return fields.kappa(k, 0); }, g.n_s, ds};
    LineSampler nu{[&](std::size_t k) -> const Vec3& { return fields.nu(k, 0); }, g.n_s, ds};
    march(kap, nu, ds, g.n_s, p0, q0,
          [&](std::size_t i, const Vec3& p, const Vec3& q) {
            out.p(i, 0) = p;
            out.q(i, 0) = q;
          });
  }

  // Along t at each s.
  parallel_for(g.n_s, [&](std::size_t ib, std::size_t ie) {
    for (std::size_t i = ib; i < ie; ++i) {
      LineSampler om{[&, i](std::size_t k) -> const Vec3& { return fields.omega(i, k); }, g.n_t, dt};
      LineSampler vv{[&, i](std::size_t k) -> const Vec3& { return fields.v(i, k); }, g.n_t, dt};
      march(om, vv, dt, g.n_t, out.p(i, 0), out.q(i, 0),
            [&](std::size_t j, const Vec3& p, const Vec3& q) {
              out.p(i, j) = p;
              out.q(i, j) = q;
            });
    }
  });

  // Cross-path consistency: march along s at t = t_max and compare with the
  // per-column results. For compatible fields the two routes agree to the
  // integrator's accuracy; incompatible fields are path dependent.
  {
    const std::size_t jt = g.n_t - 1;
    LineSampler kap{[&, jt](std::size_t k) -> const Vec3& { return fields.kappa(k, jt); }, g.n_s, ds};
    LineSampler nu{[&, jt](std::size_t k) -> const Vec3& { return fields.nu(k, jt); }, g.n_s, ds};
    double worst = 0.0;
    march(kap, nu, ds, g.n_s, out.p(0, jt), out.q(0, jt),
          [&](std::size_t i, const Vec3& p, const Vec3& q) {
            const double dp = (rotation_from_p(p) - rotation_from_p(out.p(i, jt))).norm();
            const double dq = (q - out.q(i, jt)).cwiseAbs().maxCoeff();
            worst = std::max(worst, std::max(dp, dq));
          });
    if (worst > opts.consistency_tol)
      throw InconsistentFields("cross-path integration mismatch " + std::to_string(worst) +
                               " exceeds tolerance " + std::to_string(opts.consistency_tol));
  }

  // Round trip: regenerate the rate fields from the recovered (p, q) with
  // fourth-order differences and accumulate RMS against the inputs.
  double acc_w = 0.0, acc_k = 0.0, acc_n = 0.0, acc_v = 0.0;
  for (std::size_t i = 0; i < g.n_s; ++i) {
    for (std::size_t j = 0; j < g.n_t; ++j) {
      const Vec3 p_s =
          d1_order4([&](std::size_t k) -> const Vec3& { return out.p(k, j); }, g.n_s, i, ds);
      const Vec3 p_t =
          d1_order4([&](std::size_t k) -> const Vec3& { return out.p(i, k); }, g.n_t, j, dt);
      const Vec3 q_s =
          d1_order4([&](std::size_t k) -> const Vec3& { return out.q(k, j); }, g.n_s, i, ds);
      const Vec3 q_t =
          d1_order4([&](std::size_t k) -> const Vec3& { return out.q(i, k); }, g.n_t, j, dt);
      const Vec3 w = body_rate_from_p(out.p(i, j), p_t);
      const Vec3 ka = body_rate_from_p(out.p(i, j), p_s);
      const Vec3 nu = strain_velocity_from_q(out.q(i, j), ka, q_s);
      const Vec3 vv = strain_velocity_from_q(out.q(i, j), w, q_t);
      acc_w += (w - fields.omega(i, j)).squaredNorm();
      acc_k += (ka - fields.kappa(i, j)).squaredNorm();
      acc_n += (nu - fields.nu(i, j)).squaredNorm();
      acc_v += (vv - fields.v(i, j)).squaredNorm();
    }
  }
  const double cells = 3.0 * static_cast<double>(g.n_s) * static_cast<double>(g.n_t);
  out.rms_omega = std::sqrt(acc_w / cells);
  out.rms_kappa = std::sqrt(acc_k / cells);
  out.rms_nu = std::sqrt(acc_n / cells);
  out.rms_v = std::sqrt(acc_v / cells);
  out.rms_total = std::sqrt((acc_w + acc_k + acc_n + acc_v) / (4.0 * cells));
  return out;
}

}  // namespace cosserat
