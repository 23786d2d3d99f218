#pragma once

// Random state and parameter generators shared by the test binaries.

#include <cmath>
#include <random>

#include "specsqueeze/gaussian.hpp"
#include "specsqueeze/optomech.hpp"
#include "specsqueeze/spectral.hpp"

namespace testsupport {

using namespace specsqueeze;

inline Matrix4d local_rotation(double t1, double t2) {
  Matrix4d r = Matrix4d::Zero();
  r.block<2, 2>(0, 0) << std::cos(t1), std::sin(t1), -std::sin(t1), std::cos(t1);
  r.block<2, 2>(2, 2) << std::cos(t2), std::sin(t2), -std::sin(t2), std::cos(t2);
  return r;
}

inline Matrix4d local_squeeze(double r1, double r2) {
  return Eigen::Vector4d(std::exp(r1), std::exp(-r1), std::exp(r2), std::exp(-r2)).asDiagonal();
}

inline Matrix4d beam_splitter(double t) {
  Matrix4d b = Matrix4d::Zero();
  b.block<2, 2>(0, 0) = std::cos(t) * Matrix2d::Identity();
  b.block<2, 2>(2, 2) = std::cos(t) * Matrix2d::Identity();
  b.block<2, 2>(0, 2) = std::sin(t) * Matrix2d::Identity();
  b.block<2, 2>(2, 0) = -std::sin(t) * Matrix2d::Identity();
  return b;
}

inline Matrix4d two_mode_squeeze(double r) {
  Matrix4d s = Matrix4d::Zero();
  const Matrix2d z = Eigen::Vector2d(1.0, -1.0).asDiagonal();
  s.block<2, 2>(0, 0) = std::cosh(r) * Matrix2d::Identity();
  s.block<2, 2>(2, 2) = std::cosh(r) * Matrix2d::Identity();
  s.block<2, 2>(0, 2) = std::sinh(r) * z;
  s.block<2, 2>(2, 0) = std::sinh(r) * z;
  return s;
}

/// Random symplectic map applied to a product thermal state.
inline gaussian::CovarianceMatrix random_physical_covariance(std::mt19937_64& rng,
                                                              double max_squeeze = 1.2,
                                                              double max_thermal = 3.0) {
  std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> sq(-max_squeeze, max_squeeze);
  std::uniform_real_distribution<double> th(1.0, max_thermal);
  const Matrix4d S = local_rotation(ang(rng), ang(rng)) * local_squeeze(sq(rng), sq(rng)) *
                     beam_splitter(ang(rng)) * two_mode_squeeze(sq(rng)) *
                     local_rotation(ang(rng), ang(rng));
  const double n1 = th(rng);
  const double n2 = th(rng);
  const Matrix4d D = Eigen::Vector4d(n1, n1, n2, n2).asDiagonal();
  gaussian::CovarianceMatrix C;
  C.entries = S * D * S.transpose();
  C.entries = 0.5 * (C.entries + C.entries.transpose()).eval();
  return C;
}

/// Inverse of the correlation-to-covariance map: A = T⁻¹ C T⁻ᵀ + J/2.
inline gaussian::CorrelationMatrixA correlation_from_covariance(const gaussian::CovarianceMatrix& C) {
  const cdouble i(0.0, 1.0);
  Matrix4cd T;
  T << 1.0, 0.0, 1.0, 0.0,
       -i, 0.0, i, 0.0,
       0.0, 1.0, 0.0, 1.0,
       0.0, -i, 0.0, i;
  const Matrix4cd Ti = T.inverse();
  gaussian::CorrelationMatrixA A;
  A.entries = Ti * C.entries.cast<cdouble>() * Ti.transpose() + 0.5 * commutator_block();
  return A;
}

/// Random physical (n+, n-, m): |m|² ≤ min(n+(n- + 1), n-(n+ + 1)).
inline spectral::TwoModeSpectralCorrelation random_nm(std::mt19937_64& rng, double max_n = 5.0) {
  std::uniform_real_distribution<double> un(0.0, max_n);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  spectral::TwoModeSpectralCorrelation c;
  c.n_plus = un(rng);
  c.n_minus = un(rng);
  const double bound = std::sqrt(std::min(c.n_plus * (c.n_minus + 1.0), c.n_minus * (c.n_plus + 1.0)));
  c.m = std::polar(bound * u01(rng), ang(rng));
  return c;
}

inline optomech::OptomechanicalParams fig4_params(double kappa2_over_kappa1) {
  optomech::OptomechanicalParams p;
  const double total = 0.1;
  p.kappa1 = total / (1.0 + kappa2_over_kappa1);
  p.kappa2 = total - p.kappa1;
  if (kappa2_over_kappa1 == 1.0) p.kappa1 = p.kappa2 = total / 2.0;
  p.delta = 0.0;
  p.g = 0.5;
  p.gamma = 1e-5;
  p.n_T = 13091.0;
  return p;
}

/// Random stable optomechanical parameters.
inline optomech::OptomechanicalParams random_stable_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> k(0.005, 0.3);
  std::uniform_real_distribution<double> gm(1e-6, 1e-2);
  std::uniform_real_distribution<double> dl(-1.5, 1.5);
  std::uniform_real_distribution<double> g(0.0, 0.6);
  std::uniform_real_distribution<double> nt(0.0, 2e4);
  for (;;) {
    optomech::OptomechanicalParams p;
    p.kappa1 = k(rng);
    p.kappa2 = k(rng);
    p.gamma = gm(rng);
    p.delta = dl(rng);
    p.g = g(rng);
    p.n_T = nt(rng);
    if (optomech::stability(p).stable) return p;
  }
}

}  // namespace testsupport
