#pragma once

// Invariant checks across all modules for one configured model.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "specsqueeze/cli/config.hpp"
#include "specsqueeze/detection.hpp"
#include "specsqueeze/filters.hpp"
#include "specsqueeze/gaussian.hpp"
#include "specsqueeze/optomech.hpp"
#include "specsqueeze/spectral.hpp"

namespace specsqueeze::cli {

struct CheckResult {
  std::string name;
  bool passed = false;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string note;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
};

struct ValidateOptions {
  // Test-only fault injection: adds a constant to one entry of P̃ so that
  // the symplectic identity no longer holds.
  bool corrupt_model = false;
};

namespace detail {

using MaxCheck = std::function<double()>;

inline CheckResult bounded(const std::string& name, double tol, const MaxCheck& f) {
  CheckResult r{name, false, 0.0, tol, ""};
  try {
    r.residual = f();
    r.passed = r.residual <= tol;
  } catch (const std::exception& e) {
    r.note = e.what();
  }
  return r;
}

inline double entry_gap_rel(const Matrix4cd& a, const Matrix4cd& b) {
  double worst = 0.0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      worst = std::max(worst, std::abs(a(r, c) - b(r, c)) / std::max(1.0, std::abs(b(r, c))));
  return worst;
}

inline double oracle_gap(const spectral::TwoModeSpectralCorrelation& t) {
  const double nu = gaussian::symplectic_nu_oracle(
      gaussian::two_mode_covariance_from_nm(t.n_plus, t.n_minus, t.m));
  return std::abs(spectral::squeezing_Smin(t) - nu);
}

/// Variance of the heterodyne photocurrent at the analytically optimal
/// phases and, if `weighted`, at the optimal weights.
inline double heterodyne_optimum(const spectral::TwoModeSpectralCorrelation& t, bool weighted) {
  const double theta = kPi - std::arg(t.m);
  double x1 = 1.0, x2 = 1.0;
  if (weighted) {
    // Eigenvector of [[n+, −|m|], [−|m|, n−]] for its smaller eigenvalue.
    const double a = t.n_plus, d = t.n_minus, b = -std::abs(t.m);
    const double lam = 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + b * b);
    if (b != 0.0) {
      x1 = -b;
      x2 = a - lam;
    } else {
      x1 = a <= d ? 1.0 : 0.0;
      x2 = a <= d ? 0.0 : 1.0;
    }
  }
  return detection::heterodyne_variance(t, theta, 0.0, 0.0, 0.0, x1, x2);
}

}  // namespace detail

inline ValidationReport run_validation(const RunConfig& c, const ValidateOptions& opt = {}) {
  using detail::bounded;
  ValidationReport rep;
  const bool optomech_model = c.model == ModelKind::Optomech;

  if (optomech_model) {
    const auto st = optomech::stability(c.params);
    rep.checks.push_back({"drift matrix stable", st.stable, st.max_real, -1e-12 * c.params.omega_m,
                          st.stable ? "" : "max Re(lambda) not below the margin"});
    if (!st.stable) return rep;
  }

  spectral::PowerSpectrumModel P = make_model(c);
  if (opt.corrupt_model) {
    auto clean = P.eval;
    P.eval = [clean](double w) {
      Matrix4cd out = clean(w);
      out(0, 2) += 1e-6;
      return out;
    };
  }
  const auto grid = optomech::frequency_grid(c.grid, c.params.omega_m,
                                             optomech_model ? c.params.gamma : 0.0);
  std::vector<double> nonzero;
  for (double w : grid)
    if (w != 0.0) nonzero.push_back(w);

  rep.checks.push_back(bounded("frequency grid sorted and unique", 0.0, [&] {
    return std::is_sorted(grid.begin(), grid.end()) &&
                   std::adjacent_find(grid.begin(), grid.end()) == grid.end()
               ? 0.0
               : 1.0;
  }));

  rep.checks.push_back(bounded("symplectic identity P(w) - P(-w)^T", 1e-9, [&] {
    double worst = 0.0;
    for (double w : grid) worst = std::max(worst, spectral::check_symplectic_identity(P, w));
    return worst;
  }));

  rep.checks.push_back(bounded("conjugation symmetry P(w)_12* = P(-w)_34 (relative)", 1e-9, [&] {
    double worst = 0.0;
    for (double w : grid) {
      const double scale = std::max(1.0, std::abs(P(w)(0, 1)));
      worst = std::max(worst, spectral::conjugation_residual(P, w) / scale);
    }
    return worst;
  }));

  if (optomech_model) {
    rep.checks.push_back(bounded("closed form vs matrix route (relative)", 1e-9, [&] {
      double worst = 0.0;
      for (double w : grid) worst = std::max(worst, detail::entry_gap_rel(P(w), optomech::pout_matrix_route(c.params, w)));
      return worst;
    }));

    rep.checks.push_back(bounded("alpha even, beta non-negative", 1e-12, [&] {
      double worst = 0.0;
      for (double w : grid) {
        const auto a = optomech::spectral_coefficients(c.params, w);
        const auto b = optomech::spectral_coefficients(c.params, -w);
        worst = std::max(worst, std::abs(a.alpha - b.alpha) / std::max(1e-300, std::abs(a.alpha)));
        if (a.beta_plus < 0.0 || a.beta_minus < 0.0) worst = std::max(worst, 1.0);
      }
      return worst;
    }));
  }

  rep.checks.push_back(bounded("S_min equals symplectic eigenvalue (strategies I, III)", 1e-9, [&] {
    double worst = 0.0;
    for (double w : nonzero) {
      worst = std::max(worst, detail::oracle_gap(detection::strategy_I_nm(P, 0, w)));
      worst = std::max(worst, detail::oracle_gap(detection::strategy_III_nm(P, w)));
    }
    return worst;
  }));

  if (optomech_model) {
    const std::vector<detection::Strategy> strategies{
        detection::SingleHomodyne{0}, detection::SingleHomodyne{1},
        detection::TwoModeHomodyne{1.0, std::sqrt(c.params.kappa2 / std::max(c.params.kappa1, 1e-300)), 0.0},
        detection::CrossField{}};
    rep.checks.push_back(bounded("closed-form strategy spectra vs detection pipeline", 1e-9, [&] {
      double worst = 0.0;
      for (const auto& s : strategies) {
        for (double w : nonzero) {
          const auto t = detection::detected_nm(P, s, w);
          const auto cf = optomech::strategy_spectra(c.params, s, w);
          const double scale = std::max(1.0, t.n_plus + t.n_minus);
          worst = std::max(worst, std::abs(cf.S - spectral::squeezing_S(t)) / scale);
          worst = std::max(worst, std::abs(cf.S_min - spectral::squeezing_Smin(t)) / scale);
        }
      }
      return worst;
    }));

    rep.checks.push_back(bounded("entanglement predicates agree outside 1e-10 band", 0.0, [&] {
      double disagreements = 0.0;
      for (double w : nonzero) {
        const auto t = detection::strategy_III_nm(P, w);
        const double smin = spectral::squeezing_Smin(t);
        const double margin = optomech::entanglement_margin(c.params, w);
        if (std::abs(smin - 1.0) < 1e-10 || std::abs(margin) < 1e-10) continue;
        const bool a = margin > 0.0;
        if (a != (smin < 1.0) || a != spectral::is_entangled(t)) disagreements += 1.0;
      }
      return disagreements;
    }));
  }

  rep.checks.push_back(bounded("collective mode commutator equals 1", 1e-9, [&] {
    double worst = 0.0;
    const auto t = std::get_if<detection::TwoModeHomodyne>(&c.strategy);
    const double mu1 = t ? t->mu1 : 1.0, mu2 = t ? t->mu2 : 1.0, tc = t ? t->theta_c : 0.0;
    for (std::size_t k = 0; k < nonzero.size(); k += 7) {
      worst = std::max(worst, std::abs(detection::collective_commutator(P, nonzero[k], mu1, mu2, tc) - 1.0));
    }
    return worst;
  }));

  rep.checks.push_back(bounded("heterodyne optimum equals (S+1)/2 and (S_min+1)/2 (III)", 1e-12, [&] {
    double worst = 0.0;
    for (double w : nonzero) {
      const auto t = detection::strategy_III_nm(P, w);
      const auto T = detection::heterodyne_T(t);
      const double scale = std::max(1.0, t.n_plus + t.n_minus);
      worst = std::max(worst, std::abs(detail::heterodyne_optimum(t, false) - T.T) / scale);
      worst = std::max(worst, std::abs(detail::heterodyne_optimum(t, true) - T.T_min) / scale);
    }
    return worst;
  }));

  rep.checks.push_back(bounded("closed-form nu vs eigenvalue oracle (random states)", 1e-9, [&] {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 500; ++k) {
      const double n1 = 5.0 * u(rng), n2 = 5.0 * u(rng);
      const double bound = std::sqrt(std::min(n1 * (n2 + 1.0), n2 * (n1 + 1.0)));
      const auto C = gaussian::covariance_from_standard(
          gaussian::StandardFormParams::from_occupations(n1, n2, 0.0, bound * u(rng)));
      worst = std::max(worst, std::abs(gaussian::symplectic_nu_closed(gaussian::standard_form(C)) -
                                       gaussian::symplectic_nu_oracle(C)));
    }
    return worst;
  }));

  rep.checks.push_back(bounded("2 nu = min E_S (random states)", 1e-10, [&] {
    std::mt19937_64 rng(54321);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 500; ++k) {
      const double n1 = 5.0 * u(rng), n2 = 5.0 * u(rng);
      const double mm = std::sqrt(std::min(n1 * (n2 + 1.0), n2 * (n1 + 1.0))) * u(rng);
      const auto C = gaussian::covariance_from_standard(
          gaussian::StandardFormParams::from_occupations(n1, n2, 0.0, mm));
      const double nu = gaussian::symplectic_nu_closed(gaussian::standard_form(C));
      worst = std::max(worst, std::abs(2.0 * nu - gaussian::duan_min(n1, n2, mm).es_min));
    }
    return worst;
  }));

  rep.checks.push_back(bounded("filtered correlation within 5% at tau = 100/Gamma (toy)", 0.05, [&] {
    const auto toy = spectral::lorentzian_model(1.0, 2.0, {1.5, 0.0});
    const filters::FilterKernel k(filters::FilterKind::Exponential, 100.0);
    const Matrix4cd target = toy(0.5);
    return max_abs(filters::filtered_correlation(toy, k, 0.5, -0.5) - target) / max_abs(target);
  }));

  return rep;
}

inline void print_report(std::ostream& os, const ValidationReport& rep) {
  char buf[256];
  for (const auto& c : rep.checks) {
    std::snprintf(buf, sizeof buf, "%s  %-60s max %.3e (tol %.1e)", c.passed ? "PASS" : "FAIL",
                  c.name.c_str(), c.residual, c.tolerance);
    os << buf;
    if (!c.note.empty()) os << "  [" << c.note << "]";
    os << '\n';
  }
  const auto failed = std::count_if(rep.checks.begin(), rep.checks.end(),
                                    [](const CheckResult& c) { return !c.passed; });
  os << (failed == 0 ? "all " + std::to_string(rep.checks.size()) + " checks passed"
                     : std::to_string(failed) + " of " + std::to_string(rep.checks.size()) +
                           " checks failed")
     << '\n';
}

}  // namespace specsqueeze::cli
