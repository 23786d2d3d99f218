#pragma once

// Two-mode Gaussian-state analysis: correlation and covariance matrices,
// standard form, smallest partially-transposed symplectic eigenvalue,
// logarithmic negativity and the Duan sum of variances.
//
// Conventions: operator ordering (b1, b2, b1†, b2†); quadrature ordering
// (x1, p1, x2, p2) with x = b + b†, p = -i b + i b†. The vacuum covariance
// is the identity.

#include <algorithm>
#include <cmath>
#include <limits>

#include "specsqueeze/error.hpp"
#include "specsqueeze/linalg.hpp"

namespace specsqueeze::gaussian {

/// ⟨b_j b_k⟩ in ordering (b1, b2, b1†, b2†).
struct CorrelationMatrixA {
  Matrix4cd entries = Matrix4cd::Zero();
};

/// Symmetrized quadrature covariance in ordering (x1, p1, x2, p2).
struct CovarianceMatrix {
  Matrix4d entries = Matrix4d::Identity();
};

/// Standard form diag blocks (a, a), (b, b) and off-diagonal diag(c, c').
struct StandardFormParams {
  double a = 1.0;
  double b = 1.0;
  double c = 0.0;
  double c_prime = 0.0;

  double m_plus() const { return (c + c_prime) / 4.0; }
  double m_minus() const { return (c - c_prime) / 4.0; }
  double n1() const { return (a - 1.0) / 2.0; }
  double n2() const { return (b - 1.0) / 2.0; }

  static StandardFormParams from_occupations(double n1, double n2, double m_plus,
                                             double m_minus) {
    return {2.0 * n1 + 1.0, 2.0 * n2 + 1.0, 2.0 * (m_plus + m_minus),
            2.0 * (m_plus - m_minus)};
  }
};

inline constexpr double kCommutatorTolerance = 1e-10;
inline constexpr double kPhysicalityTolerance = 1e-9;

/// Largest deviation of the two canonical commutators from 1.
inline double commutator_residual(const CorrelationMatrixA& A) {
  const auto& e = A.entries;
  return std::max(std::abs(e(0, 2) - e(2, 0) - 1.0), std::abs(e(1, 3) - e(3, 1) - 1.0));
}

/// Correlation matrix of a state already in standard form.
inline CorrelationMatrixA correlation_from_standard(double n1, double n2, double m_plus,
                                                    double m_minus) {
  CorrelationMatrixA A;
  auto& e = A.entries;
  e << 0.0, m_minus, n1 + 1.0, m_plus,
       m_minus, 0.0, m_plus, n2 + 1.0,
       n1, m_plus, 0.0, m_minus,
       m_plus, n2, m_minus, 0.0;
  return A;
}

inline CovarianceMatrix covariance_from_standard(const StandardFormParams& p) {
  CovarianceMatrix C;
  C.entries << p.a, 0.0, p.c, 0.0,
               0.0, p.a, 0.0, p.c_prime,
               p.c, 0.0, p.b, 0.0,
               0.0, p.c_prime, 0.0, p.b;
  return C;
}

/// C = T (A + Aᵀ)/2 Tᵀ. Throws NonPhysical on a broken commutator or a
/// non-negligible imaginary part.
inline CovarianceMatrix correlation_to_covariance(const CorrelationMatrixA& A) {
  if (commutator_residual(A) > kCommutatorTolerance) {
    throw Error(ErrorKind::NonPhysical, "correlation matrix violates [b, b†] = 1");
  }
  const cdouble i(0.0, 1.0);
  Matrix4cd T;
  T << 1.0, 0.0, 1.0, 0.0,
       -i, 0.0, i, 0.0,
       0.0, 1.0, 0.0, 1.0,
       0.0, -i, 0.0, i;
  const Matrix4cd sym = 0.5 * (A.entries + A.entries.transpose());
  const Matrix4cd Cc = T * sym * T.transpose();
  const double imag = Cc.imag().cwiseAbs().maxCoeff();
  if (imag > 1e-8 * std::max(1.0, Cc.real().cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::NonPhysical,
                "covariance has imaginary residue " + std::to_string(imag));
  }
  CovarianceMatrix C;
  C.entries = Cc.real();
  C.entries = 0.5 * (C.entries + C.entries.transpose()).eval();
  return C;
}

/// Smallest eigenvalue of C + iΣ; non-negative (up to roundoff) for physical states.
inline double physicality_margin(const CovarianceMatrix& C) {
  const Matrix4cd H = C.entries.cast<cdouble>() + cdouble(0.0, 1.0) * symplectic_form().cast<cdouble>();
  Eigen::SelfAdjointEigenSolver<Matrix4cd> solver(H, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

inline bool is_physical(const CovarianceMatrix& C, double tol = kPhysicalityTolerance) {
  const double asym = (C.entries - C.entries.transpose()).cwiseAbs().maxCoeff();
  return asym <= 1e-12 * std::max(1.0, C.entries.cwiseAbs().maxCoeff()) &&
         physicality_margin(C) >= -tol * std::max(1.0, C.entries.cwiseAbs().maxCoeff());
}

namespace detail {

inline Matrix2d inverse_sqrt_spd(const Matrix2d& m) {
  Eigen::SelfAdjointEigenSolver<Matrix2d> solver(m);
  if (solver.info() != Eigen::Success || solver.eigenvalues().minCoeff() <= 0.0) {
    throw Error(ErrorKind::NonPhysical, "local covariance block is not positive definite");
  }
  const Eigen::Vector2d inv = solver.eigenvalues().cwiseSqrt().cwiseInverse();
  return solver.eigenvectors() * inv.asDiagonal() * solver.eigenvectors().transpose();
}

}  // namespace detail

/// Reduction to standard form by local symplectic maps: each local block is
/// normalized to a multiple of the identity, then local rotations
/// diagonalize the off-diagonal block. Sign convention c >= |c'|.
/// A numerically vanishing off-diagonal block yields c = c' = 0.
inline StandardFormParams standard_form(const CovarianceMatrix& C) {
  const Matrix2d A = C.entries.block<2, 2>(0, 0);
  const Matrix2d B = C.entries.block<2, 2>(2, 2);
  const Matrix2d K = C.entries.block<2, 2>(0, 2);

  const double detA = A.determinant();
  const double detB = B.determinant();
  if (detA <= 0.0 || detB <= 0.0) {
    throw Error(ErrorKind::NonPhysical, "local block determinant not positive");
  }
  StandardFormParams p;
  p.a = std::sqrt(detA);
  p.b = std::sqrt(detB);

  const double scale = std::max({1.0, p.a, p.b});
  if (K.cwiseAbs().maxCoeff() <= 1e-14 * scale) {
    return p;
  }

  const Matrix2d S1 = std::sqrt(p.a) * detail::inverse_sqrt_spd(A);
  const Matrix2d S2 = std::sqrt(p.b) * detail::inverse_sqrt_spd(B);
  const Matrix2d Kn = S1 * K * S2.transpose();

  Eigen::JacobiSVD<Matrix2d> svd(Kn, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix2d U = svd.matrixU();
  Matrix2d V = svd.matrixV();
  double s0 = svd.singularValues()(0);
  double s1 = svd.singularValues()(1);
  // Local maps must be proper rotations; fold reflections into the sign of c'.
  if (U.determinant() < 0.0) {
    U.col(1) *= -1.0;
    s1 = -s1;
  }
  if (V.determinant() < 0.0) {
    V.col(1) *= -1.0;
    s1 = -s1;
  }
  p.c = s0;
  p.c_prime = s1;
  return p;
}

/// Closed form of the smallest symplectic eigenvalue of the partially
/// transposed covariance, in terms of (a, b, m+, m-).
inline double symplectic_nu_closed(const StandardFormParams& p) {
  const double a = p.a;
  const double b = p.b;
  const double mp = p.m_plus();
  const double mm = p.m_minus();
  const double r = (a - b) / (a + b);
  const double inner = 4.0 * mm * mm + (a - b) * (a - b) / 4.0 - 4.0 * r * r * mp * mp;
  const double first = (a + b) / 2.0 - std::sqrt(std::max(0.0, inner));
  const double nu2 = first * first - 16.0 * a * b / ((a + b) * (a + b)) * mp * mp;
  return std::sqrt(std::max(0.0, nu2));
}

/// Brute-force route: smallest |eigenvalue| of iΣ (Π C Π), Π = diag(1,-1,1,1).
/// Evaluated in extended precision so that large occupations do not swamp
/// the small eigenvalue.
inline double symplectic_nu_oracle(const CovarianceMatrix& C) {
  using Mat = Eigen::Matrix<long double, 4, 4>;
  Mat pt = C.entries.cast<long double>();
  pt.row(1) *= -1.0L;
  pt.col(1) *= -1.0L;
  const Mat sigma = symplectic_form().cast<long double>();
  Eigen::EigenSolver<Mat> solver(sigma * pt, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::EigenFailure, "symplectic spectrum did not converge");
  }
  // Eigenvalues of Σ C' are ±iν; those of iΣ C' are ∓ν.
  long double nu = std::numeric_limits<long double>::infinity();
  for (int k = 0; k < 4; ++k) nu = std::min(nu, std::abs(solver.eigenvalues()(k)));
  return static_cast<double>(nu);
}

/// E_N = max{0, -log2 ν}. ν is clamped to 1e-300 before the logarithm.
inline double log_negativity(double nu) {
  if (!(nu > 0.0)) {
    throw Error(ErrorKind::DomainError, "log_negativity requires nu > 0");
  }
  if (nu >= 1.0) return 0.0;
  return -std::log2(std::max(nu, 1e-300));
}

/// Sum of the two conjugate composite-quadrature variances for a state with
/// m+ = 0 (only ⟨b1 b2⟩ = m- correlations).
inline double duan_es(double n1, double n2, double m_minus, double phi1, double phi2,
                      double xi1, double xi2) {
  const double norm = xi1 * xi1 + xi2 * xi2;
  if (norm == 0.0) {
    throw Error(ErrorKind::DomainError, "duan_es requires nonzero weights");
  }
  const double num = 2.0 * n1 * xi1 * xi1 + 2.0 * n2 * xi2 * xi2 +
                     4.0 * xi1 * xi2 * m_minus * std::cos(phi1 + phi2);
  return 2.0 * (1.0 + num / norm);
}

struct DuanMinimum {
  double es_min = 2.0;
  double phase_sum = kPi;  // φ1 + φ2 at the minimum
  double weight_ratio = 1.0;  // ξ1/ξ2 at the minimum; +inf means all weight on mode 1
};

/// Minimum of duan_es over phases and weights. When m- = 0 the phase is
/// irrelevant and the weight goes to the less occupied mode (ratio 1 on ties).
inline DuanMinimum duan_min(double n1, double n2, double m_minus) {
  DuanMinimum out;
  const double root = std::sqrt(4.0 * m_minus * m_minus + (n1 - n2) * (n1 - n2));
  out.es_min = 2.0 * (1.0 + n1 + n2 - root);
  out.phase_sum = m_minus < 0.0 ? 0.0 : kPi;
  if (m_minus == 0.0) {
    if (n1 == n2) {
      out.weight_ratio = 1.0;
    } else {
      out.weight_ratio = n1 > n2 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return out;
  }
  out.weight_ratio = 2.0 * std::abs(m_minus) / (n1 - n2 + root);
  return out;
}

/// Covariance of the two-mode correlation matrix with populations n1, n2
/// and ⟨b1 b2⟩ = m, no ⟨b1 b2†⟩ terms.
inline CovarianceMatrix two_mode_covariance_from_nm(double n1, double n2, cdouble m) {
  const double re = 2.0 * m.real();
  const double im = 2.0 * m.imag();
  CovarianceMatrix C;
  C.entries << 2.0 * n1 + 1.0, 0.0, re, im,
               0.0, 2.0 * n1 + 1.0, im, -re,
               re, im, 2.0 * n2 + 1.0, 0.0,
               im, -re, 0.0, 2.0 * n2 + 1.0;
  return C;
}

inline CovarianceMatrix two_mode_squeezed_vacuum(double r) {
  const double ch = std::cosh(2.0 * r);
  const double sh = std::sinh(2.0 * r);
  CovarianceMatrix C;
  C.entries << ch, 0.0, sh, 0.0,
               0.0, ch, 0.0, -sh,
               sh, 0.0, ch, 0.0,
               0.0, -sh, 0.0, ch;
  return C;
}

}  // namespace specsqueeze::gaussian
