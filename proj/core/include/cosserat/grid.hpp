#pragma once

#include <cstddef>
#include <vector>

#include "cosserat/errors.hpp"
#include "cosserat/types.hpp"

namespace cosserat {

// Uniform rectangular grid over [s_min, s_max] x [t_min, t_max].
struct GridSpec {
  std::size_t n_s = 2;
  std::size_t n_t = 2;
  double s_min = 0.0, s_max = 1.0;
  double t_min = 0.0, t_max = 1.0;

  void validate() const {
    if (n_s < 2 || n_t < 2)
      throw GridTooSmall("grid needs at least 2 nodes per axis, got " +
                         std::to_string(n_s) + " x " + std::to_string(n_t));
    if (!(s_max > s_min) || !(t_max > t_min))
      throw GridTooSmall("grid ranges must be strictly increasing");
  }

  double ds() const { return (s_max - s_min) / static_cast<double>(n_s - 1); }
  double dt() const { return (t_max - t_min) / static_cast<double>(n_t - 1); }
  double s(std::size_t i) const { return s_min + static_cast<double>(i) * ds(); }
  double t(std::size_t j) const { return t_min + static_cast<double>(j) * dt(); }
};

// Vec3-valued field sampled on a GridSpec, stored row-major in the s index.
class Field3 {
 public:
  Field3() = default;
  Field3(std::size_t n_s, std::size_t n_t)
      : n_s_(n_s), n_t_(n_t), data_(n_s * n_t, Vec3::Zero()) {}

  Vec3& operator()(std::size_t i_s, std::size_t j_t) { return data_[i_s * n_t_ + j_t]; }
  const Vec3& operator()(std::size_t i_s, std::size_t j_t) const { return data_[i_s * n_t_ + j_t]; }

  std::size_t n_s() const { return n_s_; }
  std::size_t n_t() const { return n_t_; }

 private:
  std::size_t n_s_ = 0, n_t_ = 0;
  std::vector<Vec3> data_;
};

// The four rate fields of the rod kinematics on a common grid:
// omega (twist rate), kappa (Darboux), nu (linear strain), v (linear velocity),
// all in body components.
struct KinematicFields {
  GridSpec grid;
  Field3 omega, kappa, nu, v;

  explicit KinematicFields(const GridSpec& g)
      : grid(g),
        omega(g.n_s, g.n_t),
        kappa(g.n_s, g.n_t),
        nu(g.n_s, g.n_t),
        v(g.n_s, g.n_t) {
    grid.validate();
  }
};

}  // namespace cosserat
