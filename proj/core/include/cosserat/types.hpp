#pragma once

#include <Eigen/Dense>

namespace cosserat {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

// Rotation parameterization vector; the rotation is exp([p]x) with angle ||p||.
using RotationVector = Vec3;

inline Mat3 skew(const Vec3& a) {
  Mat3 m;
  m << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return m;
}

inline Vec3 unskew(const Mat3& m) {
  return Vec3(m(2, 1), m(0, 2), m(1, 0));
}

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace cosserat
