#pragma once

// Frequency and μ₂/μ₁ sweeps producing the versioned CSV dataset.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "specsqueeze/cli/config.hpp"
#include "specsqueeze/detection.hpp"
#include "specsqueeze/gaussian.hpp"
#include "specsqueeze/optomech.hpp"
#include "specsqueeze/spectral.hpp"

namespace specsqueeze::cli {

inline constexpr const char* kCsvVersionLine = "# specsqueeze-csv v1";

struct SweepRow {
  double mu_ratio = 0.0;
  double omega = 0.0;
  double S = 1.0;
  double S_min = 1.0;
  double nu = 1.0;
  double E_N = 0.0;
  double n_plus = 0.0;
  double n_minus = 0.0;
  cdouble m{0.0, 0.0};
  bool entangled = false;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::Omega;
  std::vector<SweepRow> rows;
  std::vector<std::string> warnings;
  std::string description;
};

/// SPECSQUEEZE_THREADS caps the worker count; unset or 0 means one worker per
/// hardware thread.
inline unsigned sweep_threads() {
  unsigned n = 0;
  if (const char* env = std::getenv("SPECSQUEEZE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0) {
      throw Error(ErrorKind::ConfigError, "SPECSQUEEZE_THREADS must be a non-negative integer");
    }
    n = static_cast<unsigned>(v);
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline spectral::TwoModeSpectralCorrelation triple_at(const spectral::PowerSpectrumModel& P,
                                                       const detection::Strategy& s, double omega) {
  if (const auto* h = std::get_if<detection::SingleHomodyne>(&s); h && omega == 0.0) {
    // Both sidebands are the zero-frequency component; the one-field
    // collective mode gives the continuous extension.
    return detection::strategy_II_nm(P, 0.0, h->field == 0 ? 1.0 : 0.0,
                                     h->field == 0 ? 0.0 : 1.0, 0.0);
  }
  return detection::detected_nm(P, s, omega);
}

inline SweepRow compute_row(const RunConfig& c, const spectral::PowerSpectrumModel& P,
                            const detection::Strategy& s, double omega) {
  SweepRow row;
  row.omega = omega;
  const auto t = triple_at(P, s, omega);
  row.n_plus = t.n_plus;
  row.n_minus = t.n_minus;
  row.m = t.m;
  if (c.model == ModelKind::Optomech) {
    const auto ss = optomech::strategy_spectra(c.params, s, omega);
    row.S = ss.S;
    row.S_min = ss.S_min;
    row.nu = ss.nu;
    row.E_N = ss.E_N;
  } else {
    row.S = spectral::squeezing_S(t);
    row.S_min = spectral::squeezing_Smin(t);
    row.nu = row.S_min;
    row.E_N = gaussian::log_negativity(row.nu);
  }
  if (std::holds_alternative<detection::Heterodyne>(s)) {
    row.S = 0.5 * (row.S + 1.0);
    row.S_min = 0.5 * (row.S_min + 1.0);
  }
  row.entangled = row.nu < 1.0;
  return row;
}

template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](unsigned id) {
    for (std::size_t k = id; k < n; k += threads) {
      try {
        body(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned id = 0; id < threads; ++id) pool.emplace_back(work, id);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline std::string describe(const RunConfig& c) {
  std::ostringstream os;
  os << "# preset=" << (c.preset.empty() ? "none" : c.preset);
  if (c.model == ModelKind::Optomech) {
    const auto& p = c.params;
    os << " model=optomech kappa1=" << format_number(p.kappa1) << " kappa2=" << format_number(p.kappa2)
       << " gamma=" << format_number(p.gamma) << " delta=" << format_number(p.delta)
       << " g=" << format_number(p.g) << " n_T=" << format_number(p.n_T);
  } else {
    os << " model=lorentzian width=" << format_number(c.toy.width) << " n=" << format_number(c.toy.n)
       << " m=" << format_number(c.toy.m.real()) << (c.toy.m.imag() < 0 ? "" : "+")
       << format_number(c.toy.m.imag()) << "i";
  }
  os << " strategy=" << detection::strategy_name(c.strategy);
  if (const auto* h = std::get_if<detection::SingleHomodyne>(&c.strategy)) os << " field=" << h->field + 1;
  if (const auto* t = std::get_if<detection::TwoModeHomodyne>(&c.strategy)) {
    os << " mu1=" << format_number(t->mu1) << " mu2=" << format_number(t->mu2)
       << " theta_c=" << format_number(t->theta_c);
  }
  if (const auto* h = std::get_if<detection::Heterodyne>(&c.strategy)) {
    os << " detuning=" << format_number(h->detuning) << " (S and S_min hold T and T_min)";
  }
  return os.str();
}

}  // namespace detail

/// Evaluates every grid point. Rows are computed concurrently and returned in
/// grid order.
inline SweepResult run_sweep(const RunConfig& c) {
  SweepResult out;
  out.axis = c.axis;
  out.description = detail::describe(c);
  if (c.model == ModelKind::Optomech) {
    const auto st = optomech::stability(c.params);
    if (!st.stable) {
      std::ostringstream os;
      os << "drift matrix is not stable (max Re lambda = " << format_number(st.max_real) << ")";
      throw Error(ErrorKind::Unstable, os.str());
    }
  }
  const auto P = make_model(c);
  if (const auto* h = std::get_if<detection::Heterodyne>(&c.strategy)) {
    switch (detection::check_heterodyne_detuning(P, h->detuning)) {
      case detection::DetuningCheck::Invalid:
        throw Error(ErrorKind::ConfigError, "heterodyne detuning must exceed the signal bandwidth " +
                                                format_number(P.bandwidth));
      case detection::DetuningCheck::Marginal:
        out.warnings.push_back("heterodyne detuning is less than ten signal bandwidths");
        break;
      case detection::DetuningCheck::Ok:
        break;
    }
  }

  const unsigned threads = sweep_threads();
  if (c.axis == SweepAxis::Omega) {
    const auto grid = optomech::frequency_grid(c.grid, c.params.omega_m,
                                               c.model == ModelKind::Optomech ? c.params.gamma : 0.0);
    out.rows.resize(grid.size());
    detail::parallel_for(grid.size(), threads,
                         [&](std::size_t k) { out.rows[k] = detail::compute_row(c, P, c.strategy, grid[k]); });
  } else {
    const auto base = std::get<detection::TwoModeHomodyne>(c.strategy);
    const int n = c.mu_points;
    out.rows.resize(static_cast<std::size_t>(n));
    detail::parallel_for(out.rows.size(), threads, [&](std::size_t k) {
      const double ratio = k + 1 == out.rows.size()
                               ? c.mu_ratio_max
                               : c.mu_ratio_min + (c.mu_ratio_max - c.mu_ratio_min) * k / (n - 1);
      const detection::TwoModeHomodyne s{1.0, ratio, base.theta_c};
      out.rows[k] = detail::compute_row(c, P, s, c.omega);
      out.rows[k].mu_ratio = ratio;
    });
  }
  return out;
}

inline std::vector<std::string> csv_columns(SweepAxis axis) {
  std::vector<std::string> cols{"omega", "S",       "S_min", "nu",   "E_N",
                                "n_plus", "n_minus", "re_m",  "im_m", "entangled"};
  if (axis == SweepAxis::MuRatio) cols.insert(cols.begin(), "mu_ratio");
  return cols;
}

inline void write_csv(std::ostream& os, const SweepResult& r) {
  os << kCsvVersionLine << '\n' << r.description << '\n';
  const auto cols = csv_columns(r.axis);
  for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
  os << '\n';
  for (const auto& row : r.rows) {
    if (r.axis == SweepAxis::MuRatio) os << format_number(row.mu_ratio) << ',';
    os << format_number(row.omega) << ',' << format_number(row.S) << ',' << format_number(row.S_min)
       << ',' << format_number(row.nu) << ',' << format_number(row.E_N) << ','
       << format_number(row.n_plus) << ',' << format_number(row.n_minus) << ','
       << format_number(row.m.real()) << ',' << format_number(row.m.imag()) << ','
       << (row.entangled ? 1 : 0) << '\n';
  }
}

}  // namespace specsqueeze::cli
