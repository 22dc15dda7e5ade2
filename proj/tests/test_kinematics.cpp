#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "cosserat/errors.hpp"
#include "cosserat/grid.hpp"
#include "cosserat/kinematics.hpp"
#include "cosserat/types.hpp"
#include "field_fixtures.hpp"

using namespace cosserat;

namespace {

Mat3 fd_rate_jacobian(const Vec3& p, double h) {
  Mat3 J;
  for (int c = 0; c < 3; ++c) {
    Vec3 e = Vec3::Zero();
    e[c] = 1.0;
    J.col(c) = (body_rate_from_p(p, h * e) - body_rate_from_p(p, -h * e)) / (2.0 * h);
  }
  return J;
}

}  // namespace

TEST_CASE("rate map is the identity at p = 0") {
  CHECK((dexp_matrix(Vec3::Zero()) - Mat3::Identity()).norm() == doctest::Approx(0.0));
  const Vec3 dp(0.3, -0.7, 0.2);
  CHECK((body_rate_from_p(Vec3::Zero(), dp) - dp).norm() < 1e-15);
}

TEST_CASE("rate map quarter-turn frozen value") {
  // A((pi/2,0,0)) * (0,1,0) = (0, 2/pi, -2/pi): worked by hand from
  // c2 = (1-cos n)/n^2 and c3 = (n-sin n)/n^3 at n = pi/2.
  const Vec3 p(0.5 * kPi, 0.0, 0.0);
  const Vec3 got = body_rate_from_p(p, Vec3(0.0, 1.0, 0.0));
  const Vec3 want(0.0, 2.0 / kPi, -2.0 / kPi);
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("rate map fixes its own axis") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    const Vec3 p = std::uniform_real_distribution<double>(0.05, 3.0)(rng) * fixtures::rand_dir(rng);
    CHECK((body_rate_from_p(p, p) - p).norm() < 1e-14 * p.norm());
  }
}

TEST_CASE("rate map matches the frame-derivative definition") {
  // Body components: rate = unskew(antisym(R^T * dR/dh)) for R(h) = exp([p + h dp]x).
  std::mt19937_64 rng(11);
  const double h = 1e-6;
  for (int k = 0; k < 30; ++k) {
    const Vec3 p = std::uniform_real_distribution<double>(0.1, 3.0)(rng) * fixtures::rand_dir(rng);
    const Vec3 dp = fixtures::rand_dir(rng);
    const Mat3 Rp = rotation_from_p(p + h * dp);
    const Mat3 Rm = rotation_from_p(p - h * dp);
    const Mat3 M = rotation_from_p(p).transpose() * ((Rp - Rm) / (2.0 * h));
    const Vec3 fd = unskew(0.5 * (M - M.transpose()));
    CHECK((body_rate_from_p(p, dp) - fd).norm() < 5e-8);
  }
}

TEST_CASE("jacobian determinant closed form and sign convention") {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 50; ++k) {
    const double n = std::uniform_real_distribution<double>(0.1, 3.0)(rng);
    const Vec3 p = n * fixtures::rand_dir(rng);
    const double closed = 2.0 * (std::cos(n) - 1.0) / (n * n);
    CHECK(jacobian_det(p) == doctest::Approx(closed).epsilon(1e-13));
    // det of the assembled matrix is +|closed| (paired complex eigenvalues).
    CHECK(dexp_matrix(p).determinant() == doctest::Approx(-closed).epsilon(1e-12));
  }
  // Frozen: at ||p|| = pi the determinant is -4/pi^2.
  CHECK(jacobian_det(Vec3(0.0, kPi, 0.0)) ==
        doctest::Approx(-4.0 / (kPi * kPi)).epsilon(1e-15));
}

TEST_CASE("jacobian determinant vanishes at full turns and series splices") {
  CHECK(std::abs(jacobian_det(Vec3(2.0 * kPi, 0.0, 0.0))) < 1e-15);
  // Across the small-angle series switch the jump is bounded by the noise
  // floor of the trig branch, where 1 - cos n cancels to ~n^2/2: about
  // 2 * 2eps/n^2 ~ 9e-8 for the determinant at n = 1e-4.
  const double lo = jacobian_det(Vec3(1e-4 * (1.0 - 1e-9), 0.0, 0.0));
  const double hi = jacobian_det(Vec3(1e-4 * (1.0 + 1e-9), 0.0, 0.0));
  CHECK(std::abs(lo - hi) < 1e-7);
  // The series side itself is far more accurate than that floor: check it
  // against an extended-precision evaluation of the closed form.
  const long double n = 1e-4L * (1.0L - 1e-9L);
  const long double ref = -2.0L * (1.0L - std::cos(n)) / (n * n);
  CHECK(std::abs(lo - static_cast<double>(ref)) < 1e-10);
  CHECK(jacobian_det(Vec3::Zero()) == doctest::Approx(-1.0));
}

TEST_CASE("rate map determinant matches finite differences") {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 50; ++k) {
    const Vec3 p = std::uniform_real_distribution<double>(0.1, 3.0)(rng) * fixtures::rand_dir(rng);
    const double det_fd = fd_rate_jacobian(p, 1e-6).determinant();
    CHECK(std::abs(det_fd + jacobian_det(p)) < 1e-6);
  }
}

TEST_CASE("inverse rate map round trip and singularity guard") {
  std::mt19937_64 rng(19);
  for (int k = 0; k < 30; ++k) {
    const Vec3 p = std::uniform_real_distribution<double>(0.05, 3.0)(rng) * fixtures::rand_dir(rng);
    const Vec3 dp = fixtures::rand_dir(rng);
    const Vec3 rate = body_rate_from_p(p, dp);
    CHECK((phi_inverse(rate, p) - dp).norm() < 1e-10);
  }
  CHECK_THROWS_AS((void)phi_inverse(Vec3(1.0, 0.0, 0.0), Vec3(2.0 * kPi, 0.0, 0.0)),
                  SingularParameterization);
}

TEST_CASE("director frame is a rotation with frozen special values") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 20; ++k) {
    const Vec3 p = std::uniform_real_distribution<double>(0.0, 3.0)(rng) * fixtures::rand_dir(rng);
    const Mat3 R = rotation_from_p(p);
    CHECK((R.transpose() * R - Mat3::Identity()).norm() < 1e-14);
    CHECK(R.determinant() == doctest::Approx(1.0).epsilon(1e-13));
  }
  // Quarter turn about x sends y to z.
  const Mat3 Q = rotation_from_p(Vec3(0.5 * kPi, 0.0, 0.0));
  CHECK((Q * Vec3(0.0, 1.0, 0.0) - Vec3(0.0, 0.0, 1.0)).norm() < 1e-15);
  // Half turn about z: diag(-1, -1, 1).
  Mat3 H;
  H << -1, 0, 0, 0, -1, 0, 0, 0, 1;
  CHECK((rotation_from_p(Vec3(0.0, 0.0, kPi)) - H).norm() < 1e-15);
}

TEST_CASE("strain generator frozen cross-product form") {
  const Vec3 q(1.0, 2.0, 3.0), rate(0.0, 1.0, 0.0), dq(0.5, 0.0, -0.5);
  // q x rate - dq = (0*3-... ) worked by hand: q x rate = (-3, 0, 1).
  const Vec3 want(-3.5, 0.0, 1.5);
  CHECK((strain_velocity_from_q(q, rate, dq) - want).norm() < 1e-15);
}

TEST_CASE("rebase shortens without changing the rotation") {
  std::mt19937_64 rng(29);
  for (int k = 0; k < 30; ++k) {
    const double n = std::uniform_real_distribution<double>(kPi * 1.01, kPi * 1.99)(rng);
    const Vec3 p = n * fixtures::rand_dir(rng);
    const Vec3 r = rebase_rotation_vector(p);
    CHECK(r.norm() <= kPi + 1e-12);
    CHECK((rotation_from_p(r) - rotation_from_p(p)).norm() < 5e-13);
  }
  const Vec3 inside(0.3, 0.2, -0.4);
  CHECK((rebase_rotation_vector(inside) - inside).norm() == 0.0);
}

TEST_CASE("branch alignment picks the representative nearest the reference") {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 30; ++k) {
    const Vec3 ref = std::uniform_real_distribution<double>(2.2, 3.0)(rng) * fixtures::rand_dir(rng);
    Vec3 x = ref + 0.1 * fixtures::rand_dir(rng);
    if (x.norm() >= kPi) x *= 0.95 * kPi / x.norm();
    // The equivalent representative on the other side of the pi sphere.
    const Vec3 other = x * (1.0 - 2.0 * kPi / x.norm());
    const Vec3 a = align_rotation_vector(ref, other);
    CHECK((a - x).norm() < 1e-12);
    CHECK((rotation_from_p(a) - rotation_from_p(other)).norm() < 5e-13);
  }
}

TEST_CASE("compatibility residuals vanish at second order on generated fields") {
  std::mt19937_64 rng(101);
  const auto P = fixtures::random_trig(rng, 0.03, 0.08);
  const auto Q = fixtures::random_trig(rng, 0.03, 0.08);
  double prev_h1 = 0.0, prev_h2 = 0.0;
  for (std::size_t n : {24u, 48u, 96u}) {
    GridSpec g{n, n, 0.0, 1.0, 0.0, 1.0};
    const auto F = fixtures::fields_from_parameterization(P, Q, g);
    const ResidualFields R = kinematic_residuals(F);
    if (prev_h1 > 0.0) {
      CHECK(std::log2(prev_h1 / R.max_h1) == doctest::Approx(2.0).epsilon(0.2));
      CHECK(std::log2(prev_h2 / R.max_h2) == doctest::Approx(2.0).epsilon(0.2));
    }
    prev_h1 = R.max_h1;
    prev_h2 = R.max_h2;
  }
  CHECK(prev_h1 < 2e-4);
  CHECK(prev_h2 < 2e-4);
}

TEST_CASE("compatibility residuals flag an incompatible field") {
  std::mt19937_64 rng(103);
  const auto P = fixtures::random_trig(rng, 0.03, 0.08);
  const auto Q = fixtures::random_trig(rng, 0.03, 0.08);
  GridSpec g{48, 48, 0.0, 1.0, 0.0, 1.0};
  auto F = fixtures::fields_from_parameterization(P, Q, g);
  for (std::size_t i = 0; i < g.n_s; ++i)
    for (std::size_t j = 0; j < g.n_t; ++j)
      F.omega(i, j)[0] += 0.05 * std::sin(3.0 * g.s(i) + g.t(j));
  CHECK(kinematic_residuals(F).max_h1 > 1e-2);
}

TEST_CASE("residuals need at least three nodes per axis") {
  GridSpec g{2, 2, 0.0, 1.0, 0.0, 1.0};
  KinematicFields F(g);
  CHECK_THROWS_AS((void)kinematic_residuals(F), GridTooSmall);
}

TEST_CASE("recovery round trip reproduces the rate fields") {
  std::mt19937_64 rng(107);
  const auto P = fixtures::random_trig(rng, 0.03, 0.08);
  const auto Q = fixtures::random_trig(rng, 0.03, 0.08);
  GridSpec g{40, 40, 0.0, 1.0, 0.0, 1.0};
  const auto F = fixtures::fields_from_parameterization(P, Q, g);
  const auto rec = recover_parameterization(F, P.value(0.0, 0.0), Q.value(0.0, 0.0));
  CHECK(rec.rms_total < 1e-6);
  CHECK(rec.rms_omega < 1e-6);
  CHECK(rec.rms_kappa < 1e-6);
  CHECK(rec.rms_nu < 1e-6);
  CHECK(rec.rms_v < 1e-6);
  // The recovered parameterization itself matches pointwise (same branch:
  // the fields keep ||p|| far inside the principal ball).
  double worst = 0.0;
  for (std::size_t i = 0; i < g.n_s; ++i)
    for (std::size_t j = 0; j < g.n_t; ++j)
      worst = std::max(worst, (rec.p(i, j) - P.value(g.s(i), g.t(j))).norm());
  CHECK(worst < 1e-7);
}

TEST_CASE("recovery follows rotations across the principal-ball boundary") {
  // p(s,t) = f(s,t) * e with f crossing pi: the marched p rebases mid-path,
  // yet the recovered rotations must match the exact ones on both branches.
  const Vec3 e(0.36, 0.48, 0.8);  // unit
  auto f = [](double s, double t) { return 0.8 * kPi + 1.2 * s + 0.4 * t; };
  GridSpec g{40, 40, 0.0, 1.0, 0.0, 1.0};
  KinematicFields F(g);
  for (std::size_t i = 0; i < g.n_s; ++i)
    for (std::size_t j = 0; j < g.n_t; ++j) {
      F.kappa(i, j) = 1.2 * e;  // A(p) fixes its own axis
      F.omega(i, j) = 0.4 * e;
      F.nu(i, j) = Vec3::Zero();
      F.v(i, j) = Vec3::Zero();
    }
  const auto rec = recover_parameterization(F, f(0.0, 0.0) * e, Vec3::Zero());
  double worst = 0.0;
  for (std::size_t i = 0; i < g.n_s; ++i)
    for (std::size_t j = 0; j < g.n_t; ++j) {
      const Mat3 want = rotation_from_p(f(g.s(i), g.t(j)) * e);
      worst = std::max(worst, (rotation_from_p(rec.p(i, j)) - want).norm());
      CHECK(rec.p(i, j).norm() <= kPi + 1e-9);
    }
  CHECK(worst < 1e-6);
}

TEST_CASE("recovery rejects incompatible fields") {
  std::mt19937_64 rng(109);
  const auto P = fixtures::random_trig(rng, 0.03, 0.08);
  const auto Q = fixtures::random_trig(rng, 0.03, 0.08);
  GridSpec g{40, 40, 0.0, 1.0, 0.0, 1.0};
  auto F = fixtures::fields_from_parameterization(P, Q, g);
  for (std::size_t i = 0; i < g.n_s; ++i)
    for (std::size_t j = 0; j < g.n_t; ++j)
      F.omega(i, j)[0] += 0.05 * std::sin(3.0 * g.s(i));
  CHECK_THROWS_AS((void)recover_parameterization(F, P.value(0.0, 0.0), Q.value(0.0, 0.0)),
                  InconsistentFields);
}
