#pragma once

// Stationary-field spectra: power-spectrum matrix models, the two-mode
// correlation (n+, n-, m) of a pair of spectral components, squeezing
// spectra and the entanglement predicate.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "specsqueeze/error.hpp"
#include "specsqueeze/linalg.hpp"

namespace specsqueeze::spectral {

/// A frequency region where the spectrum varies on a scale `width`.
struct SpectralFeature {
  double center = 0.0;
  double width = 1.0;
};

/// P̃(ω) for an ordered field pair, ordering (a1, a2, a1†, a2†).
///
/// `background` is the frequency-independent part of P̃ (the vacuum
/// contribution for physical fields); `bandwidth` and `features` describe
/// where the remainder lives and are used by the filter quadrature and the
/// heterodyne validity guard.
struct PowerSpectrumModel {
  std::function<Matrix4cd(double)> eval;
  std::array<std::string, 2> labels{"a1", "a2"};
  double bandwidth = 1.0;
  Matrix4cd background = Matrix4cd::Zero();
  std::vector<SpectralFeature> features;

  Matrix4cd operator()(double omega) const { return eval(omega); }
};

struct TwoModeSpectralCorrelation {
  double n_plus = 0.0;
  double n_minus = 0.0;
  cdouble m{0.0, 0.0};
};

/// Vacuum spectrum: only ⟨a_j a_j†⟩ entries, equal to 1.
inline Matrix4cd vacuum_spectrum() {
  Matrix4cd y = Matrix4cd::Zero();
  y(0, 2) = 1.0;
  y(1, 3) = 1.0;
  return y;
}

inline PowerSpectrumModel vacuum_model() {
  PowerSpectrumModel model;
  model.eval = [](double) { return vacuum_spectrum(); };
  model.labels = {"vac1", "vac2"};
  model.bandwidth = 0.0;
  model.background = vacuum_spectrum();
  return model;
}

/// Single-pole toy spectrum: vacuum plus a Lorentzian of half-width Γ
/// carrying populations n and pair correlation m on both sidebands.
/// Physical when n >= 0 and |m|² <= n(n+1).
inline PowerSpectrumModel lorentzian_model(double width, double n, cdouble m) {
  if (!(width > 0.0)) throw Error(ErrorKind::DomainError, "lorentzian width must be positive");
  Matrix4cd shape = Matrix4cd::Zero();
  shape(0, 1) = m;
  shape(1, 0) = m;
  shape(2, 3) = std::conj(m);
  shape(3, 2) = std::conj(m);
  shape(2, 0) = n;
  shape(3, 1) = n;
  shape(0, 2) = n;
  shape(1, 3) = n;
  PowerSpectrumModel model;
  const Matrix4cd y = vacuum_spectrum();
  model.eval = [=](double omega) {
    const double lorentz = width * width / (omega * omega + width * width);
    return Matrix4cd(y + lorentz * shape);
  };
  model.labels = {"toy1", "toy2"};
  model.bandwidth = width;
  model.background = y;
  model.features = {{0.0, width}};
  return model;
}

/// Largest entry of P̃(Ω) − P̃(−Ω)ᵀ − [[0, I], [−I, 0]].
inline double check_symplectic_identity(const PowerSpectrumModel& P, double omega) {
  const Matrix4cd r = P(omega) - P(-omega).transpose() - commutator_block();
  return max_abs(r);
}

/// |P̃(Ω)_{12}* − P̃(−Ω)_{34}|.
inline double conjugation_residual(const PowerSpectrumModel& P, double omega) {
  return std::abs(std::conj(P(omega)(0, 1)) - P(-omega)(2, 3));
}

namespace detail {

inline bool same_frequency(double x, double y) {
  return std::abs(x - y) < 1e-12 * std::max(1.0, std::abs(x));
}

inline double real_part_checked(cdouble v, const char* name) {
  const double scale = std::max(1.0, std::abs(v.real()));
  if (std::abs(v.imag()) > 1e-7 * scale) {
    throw Error(ErrorKind::NonPhysical,
                std::string(name) + " has imaginary part " + std::to_string(v.imag()));
  }
  return v.real();
}

}  // namespace detail

/// Correlation matrix of the narrow modes ā1(Ω), ā2(Ω′), ā1†(−Ω), ā2†(−Ω′)
/// in the long-filter limit. Kronecker deltas are evaluated with a relative
/// tolerance of 1e-12. The diagonal entries are ⟨ā_j(Ω)ā_j(Ω)⟩, which only
/// survive at zero frequency of the mode in question.
inline Matrix4cd assemble_pair_correlation(const PowerSpectrumModel& P, double omega,
                                           double omega_p) {
  using detail::same_frequency;
  const bool d_sum = same_frequency(omega, -omega_p);
  const bool d_eq = same_frequency(omega, omega_p);
  const bool d_o = same_frequency(omega, 0.0);
  const bool d_op = same_frequency(omega_p, 0.0);

  const Matrix4cd Po = P(omega);
  const Matrix4cd Pop = P(omega_p);
  const Matrix4cd Pmo = P(-omega);
  const Matrix4cd Pmop = P(-omega_p);
  Matrix4cd P0 = Matrix4cd::Zero();
  if (d_o || d_op) P0 = P(0.0);

  auto when = [](bool cond, cdouble v) { return cond ? v : cdouble(0.0, 0.0); };

  Matrix4cd A;
  A(0, 0) = when(d_o, P0(0, 0));
  A(0, 1) = when(d_sum, Po(0, 1));
  A(0, 2) = Po(0, 2);
  A(0, 3) = when(d_eq, Po(0, 3));

  A(1, 0) = when(d_sum, Pop(1, 0));
  A(1, 1) = when(d_op, P0(1, 1));
  A(1, 2) = when(d_eq, Pop(1, 2));
  A(1, 3) = Pop(1, 3);

  A(2, 0) = Pmo(2, 0);
  A(2, 1) = when(d_eq, Pmo(2, 1));
  A(2, 2) = when(d_o, P0(2, 2));
  A(2, 3) = when(d_sum, Pmo(2, 3));

  A(3, 0) = when(d_eq, Pmop(3, 0));
  A(3, 1) = Pmop(3, 1);
  A(3, 2) = when(d_sum, Pmop(3, 2));
  A(3, 3) = when(d_op, P0(3, 3));
  return A;
}

/// (n+, n-, m) from a single spectrum pair P̃(±Ω):
/// n+ = P̃(−Ω)_{31}, n- = P̃(Ω)_{42}, m = P̃(Ω)_{12}.
inline TwoModeSpectralCorrelation nm_from_spectra(const Matrix4cd& P_omega,
                                                  const Matrix4cd& P_minus_omega) {
  TwoModeSpectralCorrelation c;
  c.n_plus = detail::real_part_checked(P_minus_omega(2, 0), "n_plus");
  c.n_minus = detail::real_part_checked(P_omega(3, 1), "n_minus");
  c.m = P_omega(0, 1);
  return c;
}

inline TwoModeSpectralCorrelation extract_nm(const PowerSpectrumModel& P, double omega) {
  return nm_from_spectra(P(omega), P(-omega));
}

namespace detail {

inline long double smin_ld(const TwoModeSpectralCorrelation& c) {
  const long double np = c.n_plus;
  const long double nm = c.n_minus;
  const long double am = std::abs(std::complex<long double>(c.m.real(), c.m.imag()));
  return 1.0L + np + nm - std::sqrt(4.0L * am * am + (np - nm) * (np - nm));
}

}  // namespace detail

/// Variance of the composite quadrature with phases θ± and weights ξ±.
inline double composite_variance(const TwoModeSpectralCorrelation& c, double theta_plus,
                                 double theta_minus, double xi_plus, double xi_minus) {
  const long double xp = xi_plus;
  const long double xm = xi_minus;
  const long double norm = xp * xp + xm * xm;
  if (norm == 0.0L) throw Error(ErrorKind::DomainError, "composite_variance requires nonzero weights");
  const long double phase = static_cast<long double>(theta_plus) + theta_minus;
  const long double re_m_phase = static_cast<long double>(c.m.real()) * std::cos(phase) -
                                 static_cast<long double>(c.m.imag()) * std::sin(phase);
  const long double num = 2.0L * c.n_plus * xp * xp + 2.0L * c.n_minus * xm * xm +
                          4.0L * xp * xm * re_m_phase;
  return static_cast<double>(1.0L + num / norm);
}

/// Phase-optimized squeezing spectrum at equal weights.
inline double squeezing_S(const TwoModeSpectralCorrelation& c) {
  const long double am = std::abs(std::complex<long double>(c.m.real(), c.m.imag()));
  return static_cast<double>(1.0L + c.n_plus + c.n_minus - 2.0L * am);
}

/// Squeezing spectrum optimized over phases and weights.
inline double squeezing_Smin(const TwoModeSpectralCorrelation& c) {
  return static_cast<double>(detail::smin_ld(c));
}

/// Strict criterion n+ n- < |m|²; the boundary counts as separable.
inline bool is_entangled(const TwoModeSpectralCorrelation& c) {
  const long double am = std::abs(std::complex<long double>(c.m.real(), c.m.imag()));
  return static_cast<long double>(c.n_plus) * c.n_minus < am * am;
}

}  // namespace specsqueeze::spectral
