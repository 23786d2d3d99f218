#pragma once

// Two-sided cavity with a vibrating membrane, linearized: drift and noise
// matrices, stability, output power spectra (closed form and matrix route)
// and the squeezing spectra seen by each detection strategy.
//
// All rates and frequencies are in units of the mechanical frequency unless
// stated otherwise.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "specsqueeze/detection.hpp"
#include "specsqueeze/error.hpp"
#include "specsqueeze/gaussian.hpp"
#include "specsqueeze/linalg.hpp"
#include "specsqueeze/spectral.hpp"

namespace specsqueeze::optomech {

struct OptomechanicalParams {
  double kappa1 = 0.05;
  double kappa2 = 0.05;
  double gamma = 1e-5;
  double omega_m = 1.0;
  double delta = 0.0;
  double g = 0.5;
  double n_T = 13091.0;

  double kappa() const { return kappa1 + kappa2; }

  void validate() const {
    if (!(kappa1 >= 0.0 && kappa2 >= 0.0 && gamma >= 0.0 && g >= 0.0 && n_T >= 0.0)) {
      throw Error(ErrorKind::DomainError, "rates, coupling and n_T must be non-negative");
    }
    if (!(omega_m > 0.0)) throw Error(ErrorKind::DomainError, "omega_m must be positive");
  }
};

using Matrix46d = Eigen::Matrix<double, 4, 6>;
using Matrix66d = Eigen::Matrix<double, 6, 6>;
using Matrix66cd = Eigen::Matrix<cdouble, 6, 6>;

struct DriftMatrices {
  Matrix4cd M;
  Matrix46d Q;
  Matrix46d Z;
  Matrix66d C_in;
};

/// System vector (a, b, a†, b†); input vector (a1_in, a2_in, b_in, h.c.).
inline DriftMatrices drift_matrix(const OptomechanicalParams& p) {
  p.validate();
  const cdouble i(0.0, 1.0);
  const double k = p.kappa();
  DriftMatrices d;
  d.M << -k - i * p.delta, -i * p.g, 0.0, -i * p.g,
         -i * p.g, -p.gamma - i * p.omega_m, -i * p.g, 0.0,
         0.0, i * p.g, -k + i * p.delta, i * p.g,
         i * p.g, 0.0, i * p.g, -p.gamma + i * p.omega_m;
  const double s1 = std::sqrt(2.0 * p.kappa1);
  const double s2 = std::sqrt(2.0 * p.kappa2);
  const double sg = std::sqrt(2.0 * p.gamma);
  d.Q << s1, s2, 0, 0, 0, 0,
         0, 0, sg, 0, 0, 0,
         0, 0, 0, s1, s2, 0,
         0, 0, 0, 0, 0, sg;
  d.Z << 1, 0, 0, 0, 0, 0,
         0, 1, 0, 0, 0, 0,
         0, 0, 0, 1, 0, 0,
         0, 0, 0, 0, 1, 0;
  d.C_in = Matrix66d::Zero();
  d.C_in(0, 3) = 1.0;
  d.C_in(1, 4) = 1.0;
  d.C_in(2, 5) = p.n_T + 1.0;
  d.C_in(5, 2) = p.n_T;
  return d;
}

struct StabilityReport {
  bool stable = false;
  double max_real = 0.0;
  Eigen::Vector4cd eigenvalues;
};

/// Stable iff every drift eigenvalue has real part below −1e-12·ω_m;
/// marginal cases count as unstable.
inline StabilityReport stability(const OptomechanicalParams& p) {
  const auto d = drift_matrix(p);
  Eigen::ComplexEigenSolver<Matrix4cd> solver(d.M, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::EigenFailure, "drift matrix eigenvalues did not converge");
  }
  StabilityReport r;
  r.eigenvalues = solver.eigenvalues();
  r.max_real = r.eigenvalues.real().maxCoeff();
  r.stable = r.max_real < -1e-12 * p.omega_m;
  return r;
}

/// Coupling at which stability is lost, bracketed by [g_lo, g_hi] with
/// g_lo stable and g_hi unstable; bisection to tolerance tol.
inline double stability_boundary_g(OptomechanicalParams p, double g_lo, double g_hi,
                                   double tol = 1e-12) {
  p.g = g_lo;
  const bool lo_stable = stability(p).stable;
  p.g = g_hi;
  const bool hi_stable = stability(p).stable;
  if (!lo_stable || hi_stable) {
    throw Error(ErrorKind::DomainError, "stability boundary is not bracketed");
  }
  while (g_hi - g_lo > tol) {
    p.g = 0.5 * (g_lo + g_hi);
    (stability(p).stable ? g_lo : g_hi) = p.g;
  }
  return 0.5 * (g_lo + g_hi);
}

namespace detail {

using cld_t = std::complex<long double>;
using Matrix4cld = Eigen::Matrix<cld_t, 4, 4>;
using Matrix46cld = Eigen::Matrix<cld_t, 4, 6>;
using Matrix66cld = Eigen::Matrix<cld_t, 6, 6>;

// Solved in extended precision: near the mechanical resonances the output
// entries reach ~1e8 and double rounding alone would break the 1e-9 identity.
inline Matrix66cld response(const DriftMatrices& d, cld_t shift) {
  const Matrix4cld A = d.M.cast<cld_t>() + shift * Matrix4cld::Identity();
  Eigen::PartialPivLU<Matrix4cld> lu(A);
  const long double rcond = lu.rcond();
  if (!(rcond > 1e-12L)) {
    throw Error(ErrorKind::SingularMatrix, "M ± iω is ill-conditioned (rcond " +
                                               std::to_string(static_cast<double>(rcond)) + ")");
  }
  const Matrix46cld Qc = d.Q.cast<cld_t>();
  return Qc.transpose() * lu.solve(Qc) + Matrix66cld::Identity();
}

}  // namespace detail

/// P̃_out(ω) = Z [Qᵀ(M+iω)⁻¹Q + 1] C_in [Qᵀ(M−iω)⁻¹Q + 1]ᵀ Zᵀ.
///
/// C_in is split into its symmetric and antisymmetric parts. The symmetric
/// part obeys X(−ω) = X(ω)ᵀ, so it is evaluated once at |ω| and transposed;
/// the antisymmetric part carries the commutator. Each part is rounded to
/// double separately, which keeps P̃(ω) − P̃(−ω)ᵀ at the commutator block
/// even where entries are far larger than 1/ulp.
inline Matrix4cd pout_matrix_route(const OptomechanicalParams& p, double omega) {
  using detail::cld_t;
  const auto d = drift_matrix(p);
  const long double w = std::abs(static_cast<long double>(omega));
  const detail::Matrix66cld L = detail::response(d, cld_t(0.0L, w));
  const detail::Matrix66cld R = detail::response(d, cld_t(0.0L, -w));
  const detail::Matrix46cld Zc = d.Z.cast<cld_t>();
  const detail::Matrix66cld C = d.C_in.cast<cld_t>();
  const detail::Matrix66cld sym = (C + C.transpose()) * cld_t(0.5L);
  const detail::Matrix66cld anti = (C - C.transpose()) * cld_t(0.5L);
  detail::Matrix4cld X = Zc * L * sym * R.transpose() * Zc.transpose();
  detail::Matrix4cld A;
  if (omega >= 0.0) {
    A = Zc * L * anti * R.transpose() * Zc.transpose();
  } else {
    X.transposeInPlace();
    A = Zc * R * anti * L.transpose() * Zc.transpose();
  }
  auto to_double = [](cld_t v) {
    return cdouble(static_cast<double>(v.real()), static_cast<double>(v.imag()));
  };
  Matrix4cd out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out(i, j) = to_double(X(i, j)) + to_double(A(i, j));
  return out;
}

struct SpectralCoefficients {
  cdouble f;
  cdouble alpha;
  double beta_plus = 0.0;   // β_{+ω}
  double beta_minus = 0.0;  // β_{−ω}
};

namespace detail {

using ld = long double;
using cld = std::complex<long double>;

struct CoefficientsLd {
  cld f;
  cld alpha;
  ld beta_plus;
  ld beta_minus;
};

inline CoefficientsLd coefficients_ld(const OptomechanicalParams& p, double omega) {
  const ld g = p.g;
  const ld k = static_cast<ld>(p.kappa1) + p.kappa2;
  const ld gm = p.gamma;
  const ld wm = p.omega_m;
  const ld dl = p.delta;
  const ld w = omega;
  const ld nt = p.n_T;
  const cld i(0.0L, 1.0L);
  CoefficientsLd c;
  c.f = 4.0L * g * g * dl * wm -
        (wm * wm + (gm - i * w) * (gm - i * w)) * (dl * dl + (k - i * w) * (k - i * w));
  const cld kd = k + i * dl;
  const ld thermal = (2.0L * nt + 1.0L) * (gm * gm + wm * wm + w * w);
  c.alpha = -4.0L * g * g * wm * wm * kd -
            (kd * kd + w * w) * (gm * thermal + i * wm * (gm * gm + wm * wm - w * w));
  c.beta_plus = 4.0L * g * g * wm * wm * k +
                gm * (k * k + (dl + w) * (dl + w)) * (thermal - 2.0L * w * wm);
  c.beta_minus = 4.0L * g * g * wm * wm * k +
                 gm * (k * k + (dl - w) * (dl - w)) * (thermal + 2.0L * w * wm);
  return c;
}

}  // namespace detail

inline SpectralCoefficients spectral_coefficients(const OptomechanicalParams& p, double omega) {
  const auto c = detail::coefficients_ld(p, omega);
  return {cdouble(static_cast<double>(c.f.real()), static_cast<double>(c.f.imag())),
          cdouble(static_cast<double>(c.alpha.real()), static_cast<double>(c.alpha.imag())),
          static_cast<double>(c.beta_plus), static_cast<double>(c.beta_minus)};
}

/// (2g²/|f|²) Q_out W Q_out + Y.
inline Matrix4cd pout_closed_form(const OptomechanicalParams& p, double omega) {
  p.validate();
  const auto c = spectral_coefficients(p, omega);
  const cdouble a = c.alpha;
  const cdouble ac = std::conj(a);
  Matrix4cd W;
  W << ac, ac, c.beta_plus, c.beta_plus,
       ac, ac, c.beta_plus, c.beta_plus,
       c.beta_minus, c.beta_minus, a, a,
       c.beta_minus, c.beta_minus, a, a;
  const double s1 = std::sqrt(2.0 * p.kappa1);
  const double s2 = std::sqrt(2.0 * p.kappa2);
  const double q[4] = {s1, s2, s1, s2};
  const double pref = 2.0 * p.g * p.g / std::norm(c.f);
  Matrix4cd out = spectral::vacuum_spectrum();
  // q_r q_c is formed first so that P̃(ω) and P̃(−ω)ᵀ round identically.
  for (int r = 0; r < 4; ++r)
    for (int col = 0; col < 4; ++col) out(r, col) += (pref * (q[r] * q[col])) * W(r, col);
  return out;
}

enum class Route { ClosedForm, MatrixRoute };

/// Output-field pair model. Features sit at the drift eigenfrequencies.
inline spectral::PowerSpectrumModel output_spectrum_model(const OptomechanicalParams& p,
                                                          Route route = Route::ClosedForm) {
  p.validate();
  spectral::PowerSpectrumModel model;
  if (route == Route::ClosedForm) {
    model.eval = [p](double w) { return pout_closed_form(p, w); };
  } else {
    model.eval = [p](double w) { return pout_matrix_route(p, w); };
  }
  model.labels = {"out1", "out2"};
  model.background = spectral::vacuum_spectrum();
  const auto st = stability(p);
  double reach = 0.0;
  for (int k = 0; k < 4; ++k) {
    const cdouble lam = st.eigenvalues(k);
    model.features.push_back({std::abs(lam.imag()), std::max(std::abs(lam.real()), 1e-12)});
    reach = std::max(reach, std::abs(lam.imag()) + std::abs(lam.real()));
  }
  model.bandwidth = reach;
  return model;
}

struct QFactors {
  cdouble q_plus;
  cdouble q_minus;
};

inline QFactors q_factors(const OptomechanicalParams& p, const detection::Strategy& s) {
  const double r1 = std::sqrt(p.kappa1);
  const double r2 = std::sqrt(p.kappa2);
  if (const auto* h = std::get_if<detection::SingleHomodyne>(&s)) {
    const double r = h->field == 0 ? r1 : r2;
    return {r, r};
  }
  if (const auto* t = std::get_if<detection::TwoModeHomodyne>(&s)) {
    const double norm2 = t->mu1 * t->mu1 + t->mu2 * t->mu2;
    if (!(norm2 > 0.0)) throw Error(ErrorKind::DomainError, "mu1^2 + mu2^2 must be positive");
    const cdouble q = (t->mu1 * std::exp(cdouble(0.0, t->theta_c)) * r1 +
                       t->mu2 * std::exp(cdouble(0.0, -t->theta_c)) * r2) /
                      std::sqrt(norm2);
    return {q, q};
  }
  return {r1, r2};
}

struct StrategySpectra {
  double S = 1.0;
  double S_min = 1.0;
  double nu = 1.0;
  double E_N = 0.0;
};

/// Closed-form strategy spectra in terms of q±, α, β±ω.
inline StrategySpectra strategy_spectra(const OptomechanicalParams& p,
                                        const detection::Strategy& s, double omega) {
  if (!stability(p).stable) throw Error(ErrorKind::Unstable, "drift matrix is not stable");
  const auto q = q_factors(p, s);
  const auto c = detail::coefficients_ld(p, omega);
  using detail::ld;
  const ld qp2 = std::norm(std::complex<ld>(q.q_plus.real(), q.q_plus.imag()));
  const ld qm2 = std::norm(std::complex<ld>(q.q_minus.real(), q.q_minus.imag()));
  const ld pref = 4.0L * static_cast<ld>(p.g) * p.g / std::norm(c.f);
  const ld bp = qp2 * c.beta_plus;
  const ld bm = qm2 * c.beta_minus;
  const ld cross = std::sqrt(qp2 * qm2) * std::abs(c.alpha);
  StrategySpectra out;
  out.S = static_cast<double>(1.0L + pref * (bp + bm - 2.0L * cross));
  out.S_min = static_cast<double>(
      1.0L + pref * (bp + bm - std::sqrt(4.0L * cross * cross + (bp - bm) * (bp - bm))));
  out.nu = out.S_min;
  out.E_N = gaussian::log_negativity(out.nu);
  return out;
}

/// |α|² − β_ω β_{−ω}, scaled by max(|α|², β_ω β_{−ω}); positive inside an
/// entangled band.
inline double entanglement_margin(const OptomechanicalParams& p, double omega) {
  const auto c = detail::coefficients_ld(p, omega);
  const detail::ld a2 = std::norm(c.alpha);
  const detail::ld bb = c.beta_plus * c.beta_minus;
  const detail::ld scale = std::max({a2, std::abs(bb), std::numeric_limits<detail::ld>::min()});
  return static_cast<double>((a2 - bb) / scale);
}

inline bool entanglement_condition(const OptomechanicalParams& p, double omega) {
  return entanglement_margin(p, omega) > 0.0;
}

struct GridSpec {
  double omega_min = -2.0;
  double omega_max = 2.0;
  int points = 2001;
  bool insets = true;
  int inset_points = 200;      // per resonance, split evenly on both sides
  double inset_halfwidth = 100.0;  // in units of γ
  double inset_innermost = 1e-2;   // in units of γ
};

/// Uniform grid plus logarithmically dense points approaching ±ω_m from
/// both sides; sorted and de-duplicated.
inline std::vector<double> frequency_grid(const GridSpec& spec, double omega_m = 1.0,
                                          double gamma = 1e-5) {
  if (!(spec.omega_min < spec.omega_max) || spec.points < 2) {
    throw Error(ErrorKind::ConfigError, "grid needs omega_min < omega_max and points >= 2");
  }
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(spec.points + 2 * spec.inset_points));
  const double step = (spec.omega_max - spec.omega_min) / (spec.points - 1);
  for (int k = 0; k < spec.points; ++k) grid.push_back(spec.omega_min + k * step);
  grid.back() = spec.omega_max;
  if (spec.insets && spec.inset_points >= 2 && gamma > 0.0) {
    const int per_side = spec.inset_points / 2;
    const double lo = std::log10(spec.inset_innermost * gamma);
    const double hi = std::log10(spec.inset_halfwidth * gamma);
    for (double center : {-omega_m, omega_m}) {
      for (int k = 0; k < per_side; ++k) {
        const double t = per_side == 1 ? 0.0 : static_cast<double>(k) / (per_side - 1);
        const double off = std::pow(10.0, lo + t * (hi - lo));
        for (double x : {center - off, center + off}) {
          if (x >= spec.omega_min && x <= spec.omega_max) grid.push_back(x);
        }
      }
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Frequency intervals where β_ω β_{−ω} < |α|², located by sign changes on
/// the grid and refined by bisection. A strategy that probes an empty mode
/// (q+ q- = 0) sees no entanglement.
inline std::vector<Interval> entanglement_band(const OptomechanicalParams& p,
                                               const detection::Strategy& s,
                                               const std::vector<double>& grid) {
  if (!stability(p).stable) throw Error(ErrorKind::Unstable, "drift matrix is not stable");
  std::vector<Interval> bands;
  const auto q = q_factors(p, s);
  if (std::abs(q.q_plus * q.q_minus) == 0.0 || p.g == 0.0 || grid.empty()) return bands;

  auto inside = [&](double w) { return entanglement_margin(p, w) > 0.0; };
  auto edge = [&](double a, double b) {
    const bool ia = inside(a);
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
      const double mid = 0.5 * (a + b);
      (inside(mid) == ia ? a : b) = mid;
    }
    return 0.5 * (a + b);
  };

  bool in = inside(grid.front());
  double start = grid.front();
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const bool now = inside(grid[k]);
    if (now != in) {
      const double x = edge(grid[k - 1], grid[k]);
      if (now) {
        start = x;
      } else {
        bands.push_back({start, x});
      }
      in = now;
    }
  }
  if (in) bands.push_back({start, grid.back()});
  return bands;
}

/// Mean thermal occupation for angular frequency ω [rad/s] at temperature T [K].
inline double bose_occupation(double omega_rad_s, double temperature_K) {
  constexpr double hbar = 1.054571817e-34;
  constexpr double k_B = 1.380649e-23;
  if (!(omega_rad_s > 0.0) || !(temperature_K > 0.0)) {
    throw Error(ErrorKind::DomainError, "bose_occupation needs positive frequency and temperature");
  }
  return 1.0 / std::expm1(hbar * omega_rad_s / (k_B * temperature_K));
}

}  // namespace specsqueeze::optomech
