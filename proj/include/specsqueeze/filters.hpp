#pragma once

// Finite-time filtered modes ā_τ(Ω, t) and their correlations, which tend to
// the power-spectrum entries as the filter time τ grows.

#include <algorithm>
#include <cmath>
#include <vector>

#include "specsqueeze/error.hpp"
#include "specsqueeze/linalg.hpp"
#include "specsqueeze/quadrature.hpp"
#include "specsqueeze/spectral.hpp"

namespace specsqueeze::filters {

enum class FilterKind { Exponential, Step };

struct FilterKernel {
  FilterKind kind = FilterKind::Exponential;
  double tau = 1.0;

  FilterKernel() = default;
  FilterKernel(FilterKind k, double t) : kind(k), tau(t) {
    if (!(tau > 0.0)) throw Error(ErrorKind::DomainError, "filter time must be positive");
  }
};

inline constexpr double kQuadTolerance = 1e-10;
inline constexpr double kQuadFailure = 1e-8;

/// φ_τ(t), normalized so that ∫φ² dt = 1.
inline double kernel_time(const FilterKernel& k, double t) {
  if (!(k.tau > 0.0)) throw Error(ErrorKind::DomainError, "filter time must be positive");
  if (t < 0.0) return 0.0;
  switch (k.kind) {
    case FilterKind::Exponential:
      return std::sqrt(2.0 / k.tau) * std::exp(-t / k.tau);
    case FilterKind::Step:
      return t <= k.tau ? 1.0 / std::sqrt(k.tau) : 0.0;
  }
  return 0.0;
}

/// φ̃_τ(ω) = (2π)^{-1/2} ∫ φ_τ(t) e^{iωt} dt.
inline cdouble kernel_freq(const FilterKernel& k, double omega) {
  if (!(k.tau > 0.0)) throw Error(ErrorKind::DomainError, "filter time must be positive");
  const double tau = k.tau;
  switch (k.kind) {
    case FilterKind::Exponential:
      return std::sqrt(tau / kPi) / cdouble(1.0, -tau * omega);
    case FilterKind::Step: {
      const double x = 0.5 * omega * tau;
      if (std::abs(x) < 1e-8) {
        return std::sqrt(tau / (2.0 * kPi)) * std::exp(cdouble(0.0, x)) * (1.0 - x * x / 6.0);
      }
      return std::sqrt(2.0 * kPi / tau) * std::exp(cdouble(0.0, x)) * std::sin(x) / (kPi * omega);
    }
  }
  return 0.0;
}

/// ∫ φ_τ(s)² e^{-iDs} ds, equal to ∫ φ̃(ω−Ω) φ̃(−ω−Ω′) dω with D = Ω + Ω′.
inline cdouble filter_overlap(const FilterKernel& k, double D) {
  const double tau = k.tau;
  switch (k.kind) {
    case FilterKind::Exponential:
      return 2.0 / cdouble(2.0, tau * D);
    case FilterKind::Step: {
      const double x = 0.5 * D * tau;
      const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
      return std::exp(cdouble(0.0, -x)) * sinc;
    }
  }
  return 0.0;
}

namespace detail {

inline std::vector<double> feature_points(const spectral::PowerSpectrumModel& P) {
  std::vector<double> pts;
  for (const auto& f : P.features) {
    for (double s : {-1.0, 1.0}) {
      pts.push_back(s * f.center);
      pts.push_back(s * f.center - f.width);
      pts.push_back(s * f.center + f.width);
    }
  }
  return pts;
}

inline Matrix4cd integrate_exponential(const spectral::PowerSpectrumModel& P,
                                       const FilterKernel& k, double omega, double omega_p) {
  const double tau = k.tau;
  const double D = omega + omega_p;
  const Matrix4cd bg = P.background;
  // ω = Ω + tan(u)/τ maps the Lorentzian kernel onto a bounded weight.
  auto integrand = [&](double u) -> Matrix4cd {
    const double c = std::cos(u);
    if (c <= 0.0) return Matrix4cd::Zero();
    const double w = omega + std::tan(u) / tau;
    const cdouble eiu = std::exp(cdouble(0.0, u));
    const cdouble weight = eiu / (kPi * (eiu + cdouble(0.0, tau * D * c)));
    return weight * (P(w) - bg);
  };
  const double half = 0.5 * kPi;
  std::vector<double> extra;
  for (double x : feature_points(P)) extra.push_back(std::atan(tau * (x - omega)));
  extra.push_back(std::atan(tau * (-omega_p - omega)));
  extra.push_back(0.0);
  const auto breaks = quadrature::make_breaks(-half, half, extra);
  auto res = quadrature::integrate<Matrix4cd>(integrand, breaks, kQuadTolerance);
  if (!(res.error <= kQuadFailure) || !res.value.allFinite()) {
    throw Error(ErrorKind::QuadratureFailure,
                "filtered correlation error estimate " + std::to_string(res.error));
  }
  return res.value;
}

inline Matrix4cd integrate_step(const spectral::PowerSpectrumModel& P, const FilterKernel& k,
                                double omega, double omega_p) {
  const double tau = k.tau;
  const Matrix4cd bg = P.background;
  auto integrand = [&](double w) -> Matrix4cd {
    const cdouble kern = kernel_freq(k, w - omega) * kernel_freq(k, -w - omega_p);
    return kern * (P(w) - bg);
  };
  const double reach = std::max(std::abs(omega), std::abs(omega_p)) +
                       200.0 * std::max(P.bandwidth, 1.0 / tau);
  const double period = 2.0 * kPi / tau;
  const int max_panels = 4000;
  const double step = std::max(period, 2.0 * reach / max_panels);
  std::vector<double> extra;
  for (double x = -reach + step; x < reach; x += step) extra.push_back(x);
  for (double x : feature_points(P)) extra.push_back(x);
  extra.push_back(omega);
  extra.push_back(-omega_p);
  const auto breaks = quadrature::make_breaks(-reach, reach, extra);
  auto res = quadrature::integrate<Matrix4cd>(integrand, breaks, kQuadTolerance, 200000);
  if (!(res.error <= kQuadFailure) || !res.value.allFinite()) {
    throw Error(ErrorKind::QuadratureFailure,
                "filtered correlation error estimate " + std::to_string(res.error));
  }
  return res.value;
}

}  // namespace detail

/// ⟨ā_τ(Ω, 0) ā_τ(Ω′, 0)ᵀ⟩ = ∫ φ̃(ω−Ω) φ̃(−ω−Ω′) P̃(ω) dω.
///
/// The background of the model contributes analytically through the
/// filter overlap; only the frequency-dependent remainder is integrated.
inline Matrix4cd filtered_correlation(const spectral::PowerSpectrumModel& P,
                                      const FilterKernel& k, double omega, double omega_p) {
  Matrix4cd out = filter_overlap(k, omega + omega_p) * P.background;
  if (P.bandwidth <= 0.0 && P.features.empty()) {
    // Nothing but background: the remainder vanishes identically.
    return out;
  }
  switch (k.kind) {
    case FilterKind::Exponential:
      out += detail::integrate_exponential(P, k, omega, omega_p);
      break;
    case FilterKind::Step:
      out += detail::integrate_step(P, k, omega, omega_p);
      break;
  }
  return out;
}

/// ⟨ā_τ(Ω, t)⟩ for a coherent mean amplitude α.
inline cdouble filtered_mean(cdouble alpha, const FilterKernel& k, double omega, double t) {
  return std::sqrt(2.0 * kPi) * alpha * std::exp(cdouble(0.0, omega * t)) *
         kernel_freq(k, -omega);
}

struct ConvergenceRow {
  double tau = 0.0;
  double residual = 0.0;
};

/// max-entry distance between the filtered correlation at (Ω, −Ω) and P̃(Ω)
/// for each filter time.
inline std::vector<ConvergenceRow> convergence_report(const spectral::PowerSpectrumModel& P,
                                                      FilterKind kind, double omega,
                                                      const std::vector<double>& taus) {
  if (!std::is_sorted(taus.begin(), taus.end())) {
    throw Error(ErrorKind::DomainError, "filter times must be ascending");
  }
  std::vector<ConvergenceRow> rows;
  const Matrix4cd target = P(omega);
  for (double tau : taus) {
    const FilterKernel k(kind, tau);
    rows.push_back({tau, max_abs(filtered_correlation(P, k, omega, -omega) - target)});
  }
  return rows;
}

}  // namespace specsqueeze::filters
