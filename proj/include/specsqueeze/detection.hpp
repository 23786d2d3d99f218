#pragma once

// Homodyne and heterodyne detection models: which pair of spectral modes a
// measurement probes, and the (n+, n-, m) triple that governs its spectrum.

#include <cmath>
#include <string>
#include <variant>

#include "specsqueeze/error.hpp"
#include "specsqueeze/linalg.hpp"
#include "specsqueeze/spectral.hpp"

namespace specsqueeze::detection {

using spectral::PowerSpectrumModel;
using spectral::TwoModeSpectralCorrelation;

/// Phases and weights of the summed pair of filtered photocurrents.
struct PhotocurrentWeights {
  double theta_plus = 0.0;
  double theta_minus = 0.0;
  double xi_plus = 1.0;
  double xi_minus = 1.0;
};

/// Two filtered photocurrents with local-oscillator phases θ, θ′ and filter
/// phases φ, φ′, summed.
inline PhotocurrentWeights photocurrent_combination(double theta, double theta_p, double phi,
                                                    double phi_p) {
  PhotocurrentWeights w;
  w.theta_plus = 0.5 * (theta + theta_p + (phi + phi_p));
  w.theta_minus = 0.5 * (theta + theta_p - (phi + phi_p));
  w.xi_plus = std::cos(0.5 * (theta - theta_p + (phi - phi_p)));
  w.xi_minus = std::cos(0.5 * (theta - theta_p - (phi - phi_p)));
  return w;
}

/// Homodyne spectrum of a single filtered photocurrent J^(θ,φ)(ε).
inline double homodyne_spectrum(const TwoModeSpectralCorrelation& c, double theta, double phi) {
  return spectral::composite_variance(c, theta + phi, theta - phi, 1.0, 1.0);
}

/// 2×2 spectrum of one field in ordering (a, a†).
struct SingleFieldSpectrum {
  std::function<Matrix2cd(double)> eval;
  double bandwidth = 1.0;

  Matrix2cd operator()(double omega) const { return eval(omega); }
};

inline SingleFieldSpectrum field_spectrum(const PowerSpectrumModel& P, int field) {
  if (field != 0 && field != 1) throw Error(ErrorKind::DomainError, "field index must be 0 or 1");
  SingleFieldSpectrum s;
  s.eval = [P, field](double omega) {
    const Matrix4cd full = P(omega);
    Matrix2cd out;
    out << full(field, field), full(field, 2 + field),
           full(2 + field, field), full(2 + field, 2 + field);
    return out;
  };
  s.bandwidth = P.bandwidth;
  return s;
}

/// Pair model whose two "fields" are both the chosen field. Its (n+, n-, m)
/// at ε are the single-field sideband correlations.
inline PowerSpectrumModel duplicated_field_model(const PowerSpectrumModel& P, int field) {
  if (field != 0 && field != 1) throw Error(ErrorKind::DomainError, "field index must be 0 or 1");
  PowerSpectrumModel dup;
  const int idx[4] = {field, field, 2 + field, 2 + field};
  dup.eval = [P, idx](double omega) {
    const Matrix4cd full = P(omega);
    Matrix4cd out;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) out(r, c) = full(idx[r], idx[c]);
    return out;
  };
  dup.labels = {P.labels[field], P.labels[field]};
  dup.bandwidth = P.bandwidth;
  dup.features = P.features;
  return dup;
}

/// Sidebands ā(±ε) of a single field:
/// n± = ⟨ā†(∓ε) ā(±ε)⟩, m = ⟨ā(ε) ā(−ε)⟩.
inline TwoModeSpectralCorrelation strategy_I_nm(const SingleFieldSpectrum& Ps, double eps) {
  if (eps == 0.0) {
    throw Error(ErrorKind::DegenerateFrequency, "single-field sidebands coincide at zero frequency");
  }
  const Matrix2cd plus = Ps(eps);
  const Matrix2cd minus = Ps(-eps);
  Matrix4cd P_eps = Matrix4cd::Zero();
  Matrix4cd P_meps = Matrix4cd::Zero();
  P_eps(3, 1) = plus(1, 0);
  P_eps(0, 1) = plus(0, 0);
  P_meps(2, 0) = minus(1, 0);
  return spectral::nm_from_spectra(P_eps, P_meps);
}

inline TwoModeSpectralCorrelation strategy_I_nm(const PowerSpectrumModel& P, int field,
                                                double eps) {
  return strategy_I_nm(field_spectrum(P, field), eps);
}

namespace detail {

inline std::array<cdouble, 2> collective_weights(double mu1, double mu2, double theta_c) {
  const double norm2 = mu1 * mu1 + mu2 * mu2;
  if (!(norm2 > 0.0)) throw Error(ErrorKind::DomainError, "mu1^2 + mu2^2 must be positive");
  const double n = std::sqrt(norm2);
  return {mu1 * std::exp(cdouble(0.0, theta_c)) / n, mu2 * std::exp(cdouble(0.0, -theta_c)) / n};
}

}  // namespace detail

/// Collective modes c̄(±ε) = Σ u_j ā_j(±ε) with u = (μ1 e^{iθc}, μ2 e^{−iθc})/√(μ1²+μ2²);
/// the triple is the bilinear expansion of ⟨c̄†c̄⟩ and ⟨c̄ c̄⟩.
inline TwoModeSpectralCorrelation strategy_II_nm(const PowerSpectrumModel& P, double eps,
                                                 double mu1, double mu2, double theta_c) {
  const auto u = detail::collective_weights(mu1, mu2, theta_c);
  const Matrix4cd Pe = P(eps);
  const Matrix4cd Pme = P(-eps);
  cdouble np = 0.0;
  cdouble nm = 0.0;
  cdouble m = 0.0;
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) {
      np += std::conj(u[j]) * u[k] * Pme(2 + j, k);
      nm += std::conj(u[j]) * u[k] * Pe(2 + j, k);
      m += u[j] * u[k] * Pe(j, k);
    }
  }
  Matrix4cd A = Matrix4cd::Zero();
  Matrix4cd B = Matrix4cd::Zero();
  A(3, 1) = nm;
  A(0, 1) = m;
  B(2, 0) = np;
  return spectral::nm_from_spectra(A, B);
}

/// ⟨[c̄(ε), c̄†(−ε)]⟩ evaluated from the spectrum.
inline cdouble collective_commutator(const PowerSpectrumModel& P, double eps, double mu1,
                                     double mu2, double theta_c) {
  const auto u = detail::collective_weights(mu1, mu2, theta_c);
  const Matrix4cd Pe = P(eps);
  const Matrix4cd Pme = P(-eps);
  cdouble cc_dag = 0.0;
  cdouble c_dag_c = 0.0;
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) {
      cc_dag += u[j] * std::conj(u[k]) * Pe(j, 2 + k);
      c_dag_c += std::conj(u[k]) * u[j] * Pme(2 + k, j);
    }
  }
  return cc_dag - c_dag_c;
}

/// Literal transcription of the printed collective-mode formulas, phases
/// θ-, θ1 + φ, θ2 + φ as free arguments. Kept for comparison only; it agrees
/// with strategy_II_nm when θ- = θc, θ1 + φ = 2θc and θ2 + φ = 0.
struct PrintedCollectiveNm {
  cdouble n_plus;
  cdouble n_minus;
  cdouble m;
};

inline PrintedCollectiveNm collective_nm_printed(const PowerSpectrumModel& P, double eps,
                                                 double mu1, double mu2, double theta_minus,
                                                 double theta1_plus_phi, double theta2_plus_phi) {
  const Matrix4cd Pe = P(eps);
  const Matrix4cd Pme = P(-eps);
  const double norm2 = mu1 * mu1 + mu2 * mu2;
  auto n_of = [&](const Matrix4cd& S) {
    const cdouble v11 = S(2, 0);
    const cdouble v22 = S(3, 1);
    const cdouble v21 = S(3, 0);
    return (mu1 * mu1 * v11 + mu2 * mu2 * v22 +
            2.0 * mu1 * mu2 * std::abs(v21) * std::cos(2.0 * theta_minus + std::arg(v21))) /
           norm2;
  };
  PrintedCollectiveNm out;
  out.n_plus = n_of(Pme);
  out.n_minus = n_of(Pe);
  const cdouble e1 = std::exp(cdouble(0.0, theta1_plus_phi));
  const cdouble e2 = std::exp(cdouble(0.0, theta2_plus_phi));
  out.m = (mu1 * mu1 * e1 * Pe(0, 0) + mu2 * mu2 / e1 * Pe(1, 1) +
           mu1 * mu2 * (e2 * Pe(0, 1) + Pe(1, 0) / e2)) /
          norm2;
  return out;
}

/// Cross-field pair ā1(ε), ā2(−ε).
inline TwoModeSpectralCorrelation strategy_III_nm(const PowerSpectrumModel& P, double eps) {
  return spectral::extract_nm(P, eps);
}

struct HeterodyneSpectra {
  double T = 1.0;
  double T_min = 1.0;
};

/// Heterodyne spectra carry an extra half unit of vacuum noise from the
/// image sidebands at 2Δ ± Ω.
inline HeterodyneSpectra heterodyne_T(const TwoModeSpectralCorrelation& c) {
  return {0.5 * (spectral::squeezing_S(c) + 1.0), 0.5 * (spectral::squeezing_Smin(c) + 1.0)};
}

/// Heterodyne photocurrent autocorrelation for the cross-field pair with
/// local-oscillator phases θj, filter phases φj and heterodyne weights ξj.
inline double heterodyne_variance(const TwoModeSpectralCorrelation& c, double theta1,
                                  double phi1, double theta2, double phi2, double xi1,
                                  double xi2) {
  return 0.5 * spectral::composite_variance(c, theta1 - phi1, theta2 - phi2, xi1, xi2) + 0.5;
}

enum class DetuningCheck { Ok, Marginal, Invalid };

/// |Δ| must exceed the signal bandwidth; below ten bandwidths the image
/// sidebands are not reliably empty.
inline DetuningCheck check_heterodyne_detuning(const PowerSpectrumModel& P, double detuning) {
  const double d = std::abs(detuning);
  if (d <= P.bandwidth) return DetuningCheck::Invalid;
  if (d < 10.0 * P.bandwidth) return DetuningCheck::Marginal;
  return DetuningCheck::Ok;
}

/// N_τ for the photocurrent filtered over τ at analysis frequency ε.
inline double photocurrent_normalization(double tau, double eps) {
  if (tau < 0.0 || eps < 0.0) {
    throw Error(ErrorKind::DomainError, "photocurrent_normalization needs tau, eps >= 0");
  }
  const double x = tau * eps;
  if (std::isinf(x)) return 1.0;
  return std::sqrt((1.0 + x) / (2.0 + x));
}

struct SingleHomodyne {
  int field = 0;
};
struct TwoModeHomodyne {
  double mu1 = 1.0;
  double mu2 = 1.0;
  double theta_c = 0.0;
};
struct CrossField {};
struct Heterodyne {
  double detuning = 0.0;
};

using Strategy = std::variant<SingleHomodyne, TwoModeHomodyne, CrossField, Heterodyne>;

inline std::string strategy_name(const Strategy& s) {
  switch (s.index()) {
    case 0: return "I";
    case 1: return "II";
    case 2: return "III";
    default: return "heterodyne";
  }
}

/// The spectral-mode triple probed by a detection strategy at ε. Heterodyne
/// detection probes the same pair as the cross-field strategy; an invalid
/// detuning throws DomainError.
inline TwoModeSpectralCorrelation detected_nm(const PowerSpectrumModel& P, const Strategy& s,
                                             double eps) {
  if (const auto* h = std::get_if<SingleHomodyne>(&s)) return strategy_I_nm(P, h->field, eps);
  if (const auto* t = std::get_if<TwoModeHomodyne>(&s)) {
    return strategy_II_nm(P, eps, t->mu1, t->mu2, t->theta_c);
  }
  if (const auto* het = std::get_if<Heterodyne>(&s)) {
    if (check_heterodyne_detuning(P, het->detuning) == DetuningCheck::Invalid) {
      throw Error(ErrorKind::DomainError, "heterodyne detuning within the signal bandwidth");
    }
  }
  return strategy_III_nm(P, eps);
}

}  // namespace specsqueeze::detection
