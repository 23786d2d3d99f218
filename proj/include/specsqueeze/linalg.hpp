#pragma once

#include <Eigen/Dense>
#include <complex>

namespace specsqueeze {

using cdouble = std::complex<double>;
using cldouble = std::complex<long double>;

using Matrix2cd = Eigen::Matrix2cd;
using Matrix4cd = Eigen::Matrix4cd;
using Matrix4d = Eigen::Matrix4d;
using Matrix2d = Eigen::Matrix2d;

inline constexpr double kPi = 3.14159265358979323846;

// Σ = ⊕ [[0,1],[-1,0]] in quadrature ordering (x1, p1, x2, p2).
inline Matrix4d symplectic_form() {
  Matrix4d s = Matrix4d::Zero();
  s(0, 1) = 1.0;
  s(1, 0) = -1.0;
  s(2, 3) = 1.0;
  s(3, 2) = -1.0;
  return s;
}

// [[0, I2], [-I2, 0]] in operator ordering (a1, a2, a1†, a2†).
inline Matrix4cd commutator_block() {
  Matrix4cd j = Matrix4cd::Zero();
  j(0, 2) = 1.0;
  j(1, 3) = 1.0;
  j(2, 0) = -1.0;
  j(3, 1) = -1.0;
  return j;
}

inline double max_abs(const Matrix4cd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace specsqueeze
