#include "catch_amalgamated.hpp"

#include <cmath>
#include <functional>

#include "specsqueeze/filters.hpp"

using namespace specsqueeze;
using namespace specsqueeze::filters;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Composite 10-point Gauss-Legendre on equal panels; independent of the
// library's adaptive integrator.
template <typename T>
T gauss_legendre(const std::function<T(double)>& f, double a, double b, int panels) {
  static const double x[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                              0.8650633666889845, 0.9739065285171717};
  static const double w[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                              0.1494513491505806, 0.0666713443086881};
  T sum = f(0.5 * (a + b)) * 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    for (int j = 0; j < 5; ++j) {
      const double d = 0.5 * h * x[j];
      sum = sum + (f(c - d) + f(c + d)) * (0.5 * h * w[j]);
    }
  }
  return sum;
}

const std::array<FilterKind, 2> kKinds{FilterKind::Exponential, FilterKind::Step};

double support_end(const FilterKernel& k) {
  return k.kind == FilterKind::Step ? k.tau : 60.0 * k.tau;
}

// Frequency-domain brute force of ∫ φ̃(ω−Ω) φ̃(−ω−Ω′) [P̃(ω) − background] dω
// with ω = Ω + tan(u).
Matrix4cd brute_remainder(const spectral::PowerSpectrumModel& P, const FilterKernel& k,
                          double omega, double omega_p) {
  std::function<Matrix4cd(double)> f = [&](double u) -> Matrix4cd {
    const double c = std::cos(u);
    if (c <= 0.0) return Matrix4cd::Zero();
    const double w = omega + std::tan(u);
    const cdouble kern = kernel_freq(k, w - omega) * kernel_freq(k, -w - omega_p);
    return (kern / (c * c)) * (P(w) - P.background);
  };
  return gauss_legendre(f, -0.5 * kPi, 0.5 * kPi, 40000);
}

}  // namespace

TEST_CASE("kernel closed-form examples") {
  for (double tau : {0.3, 1.0, 50.0}) {
    const FilterKernel step(FilterKind::Step, tau);
    CHECK_THAT(std::abs(kernel_freq(step, 0.0) - std::sqrt(tau / (2.0 * kPi))), WithinAbs(0.0, 1e-15));
    const FilterKernel ex(FilterKind::Exponential, tau);
    for (double w : {-2.0, 0.0, 0.4, 7.0}) {
      CHECK_THAT(std::norm(kernel_freq(ex, w)), WithinRel((tau / kPi) / (1.0 + tau * tau * w * w), 1e-14));
    }
    // The Lorentzian |φ̃|² integrates to 1: (τ/π)∫dω/(1+τ²ω²) = (1/π)[atan(τω)].
    std::function<double(double)> lor = [&](double u) {
      return std::norm(kernel_freq(ex, std::tan(u) / tau)) / (tau * std::cos(u) * std::cos(u)) * tau;
    };
    CHECK_THAT(gauss_legendre(lor, -0.5 * kPi + 1e-12, 0.5 * kPi - 1e-12, 200) / tau, WithinAbs(1.0, 1e-10));
  }
}

TEST_CASE("kernel_freq is the Fourier transform of kernel_time") {
  for (auto kind : kKinds) {
    const FilterKernel k(kind, 2.0);
    for (int j = 0; j < 50; ++j) {
      const double w = -6.0 + 12.0 * j / 49.0;
      std::function<cdouble(double)> f = [&](double t) {
        return kernel_time(k, t) * std::exp(cdouble(0.0, w * t)) / std::sqrt(2.0 * kPi);
      };
      const cdouble ft = gauss_legendre(f, 0.0, support_end(k), 2000);
      CHECK(std::abs(ft - kernel_freq(k, w)) < 1e-8);
    }
  }
}

TEST_CASE("kernels are normalized over a wide range of filter times") {
  for (auto kind : kKinds) {
    for (double tau = 1e-2; tau <= 1e4 * 1.0001; tau *= 10.0) {
      const FilterKernel k(kind, tau);
      std::function<double(double)> f = [&](double t) { return kernel_time(k, t) * kernel_time(k, t); };
      CHECK_THAT(gauss_legendre(f, 0.0, support_end(k), 2000), WithinRel(1.0, 1e-8));
    }
  }
}

TEST_CASE("non-positive filter times are rejected") {
  CHECK_THROWS_AS(FilterKernel(FilterKind::Step, 0.0), Error);
  CHECK_THROWS_AS(FilterKernel(FilterKind::Exponential, -1.0), Error);
  FilterKernel raw;
  raw.tau = 0.0;
  CHECK_THROWS_AS(kernel_time(raw, 1.0), Error);
  CHECK_THROWS_AS(kernel_freq(raw, 1.0), Error);
}

TEST_CASE("filter overlap matches its time-domain definition") {
  for (auto kind : kKinds) {
    for (double tau : {0.5, 4.0}) {
      const FilterKernel k(kind, tau);
      for (double D : {0.0, 0.3, -1.7, 5.0}) {
        std::function<cdouble(double)> f = [&](double s) {
          const double p = kernel_time(k, s);
          return p * p * std::exp(cdouble(0.0, -D * s));
        };
        CHECK(std::abs(gauss_legendre(f, 0.0, support_end(k), 4000) - filter_overlap(k, D)) < 1e-10);
      }
    }
  }
}

TEST_CASE("filtered vacuum keeps the canonical commutator for every filter time") {
  const auto vac = spectral::vacuum_model();
  for (auto kind : kKinds) {
    for (double tau : {1e-2, 1.0, 37.0, 1e4}) {
      const FilterKernel k(kind, tau);
      for (double w : {0.0, 0.8, -3.0}) {
        const Matrix4cd F = filtered_correlation(vac, k, w, -w);
        const Matrix4cd G = filtered_correlation(vac, k, -w, w);
        CHECK(F(0, 2) - G(2, 0) == cdouble(1.0));
        CHECK(F(1, 3) - G(3, 1) == cdouble(1.0));
      }
    }
  }
}

TEST_CASE("filtered correlation agrees with brute-force frequency integration") {
  const auto toy = spectral::lorentzian_model(1.0, 2.0, {1.0, 0.5});
  for (auto kind : kKinds) {
    for (double tau : {3.0, 20.0}) {
      const FilterKernel k(kind, tau);
      for (double wp : {-0.5, 0.8}) {
        const Matrix4cd lib = filtered_correlation(toy, k, 0.5, wp);
        const Matrix4cd ref = filter_overlap(k, 0.5 + wp) * toy.background + brute_remainder(toy, k, 0.5, wp);
        CHECK(max_abs(lib - ref) < 1e-7);
      }
    }
  }
}

TEST_CASE("toy spectrum convergence within five percent at a hundred inverse widths") {
  const double gamma = 1.0;
  const auto toy = spectral::lorentzian_model(gamma, 2.0, {1.0, 0.5});
  for (auto kind : kKinds) {
    const auto rows = convergence_report(toy, kind, 0.5 * gamma, {100.0 / gamma});
    CHECK(rows[0].residual < 0.05 * max_abs(toy(0.5 * gamma)));
  }
}

TEST_CASE("exponential-filter residual scales as one over tau") {
  const auto toy = spectral::lorentzian_model(1.0, 2.0, {1.0, 0.5});
  const auto rows = convergence_report(toy, FilterKind::Exponential, 0.5, {50.0, 100.0, 200.0, 400.0});
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const double ratio = rows[i].residual / rows[i + 1].residual;
    CHECK(ratio > 1.8);
    CHECK(ratio < 2.2);
  }
}

TEST_CASE("cross-frequency correlations shrink as the filter narrows") {
  const auto toy = spectral::lorentzian_model(1.0, 2.0, {1.0, 0.5});
  for (auto kind : kKinds) {
    double prev = 1e300;
    for (double tau : {10.0, 100.0, 1000.0}) {
      const double mag = max_abs(filtered_correlation(toy, FilterKernel(kind, tau), 1.0, 1.0));
      CHECK(mag < prev);
      CHECK(mag * tau < 3.0);  // |Ω+Ω′|τ ≫ 1 regime: bounded by a 1/τ envelope
      prev = mag;
    }
  }
}

TEST_CASE("filtered mean examples") {
  for (auto kind : kKinds) CHECK(filtered_mean(0.0, FilterKernel(kind, 3.0), 0.4, 1.0) == cdouble(0.0));
  const cdouble alpha(0.7, -0.2);
  for (double tau : {0.5, 4.0}) {
    const auto m = filtered_mean(alpha, FilterKernel(FilterKind::Step, tau), 0.0, 2.0);
    CHECK(std::abs(m - alpha * std::sqrt(tau)) < 1e-14);
  }
  double prev = 1e300;
  for (double tau : {1.0, 10.0, 100.0}) {
    const double mag = std::abs(filtered_mean(1.0, FilterKernel(FilterKind::Exponential, tau), 1.0, 0.0));
    CHECK_THAT(mag, WithinRel(std::sqrt(2.0 * tau / (1.0 + tau * tau)), 1e-13));
    CHECK(mag < prev);
    prev = mag;
  }
}

TEST_CASE("convergence report bookkeeping") {
  const auto rows = convergence_report(spectral::vacuum_model(), FilterKind::Step, 0.3, {1.0, 10.0, 100.0});
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) CHECK(r.residual == 0.0);
  CHECK_THROWS_AS(convergence_report(spectral::vacuum_model(), FilterKind::Step, 0.3, {10.0, 1.0}), Error);
}

TEST_CASE("a non-finite spectrum is reported as a quadrature failure") {
  auto bad = spectral::lorentzian_model(1.0, 1.0, {0.5, 0.0});
  bad.eval = [](double w) {
    Matrix4cd m = spectral::vacuum_spectrum();
    if (std::abs(w - 0.2) < 0.1) m(0, 1) = std::nan("");
    return m;
  };
  for (auto kind : kKinds) {
    try {
      filtered_correlation(bad, FilterKernel(kind, 5.0), 0.2, -0.2);
      FAIL("expected QuadratureFailure");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::QuadratureFailure);
    }
  }
}
