#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>

#include "specsqueeze/detection.hpp"
#include "specsqueeze/optomech.hpp"
#include "support.hpp"

using namespace specsqueeze;
using namespace specsqueeze::detection;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

PowerSpectrumModel model_for(double ratio) {
  return optomech::output_spectrum_model(testsupport::fig4_params(ratio));
}

bool close_nm(const TwoModeSpectralCorrelation& a, const TwoModeSpectralCorrelation& b, double rel) {
  const double scale = std::max({1.0, std::abs(a.n_plus), std::abs(a.n_minus), std::abs(a.m)});
  return std::abs(a.n_plus - b.n_plus) <= rel * scale && std::abs(a.n_minus - b.n_minus) <= rel * scale &&
         std::abs(a.m - b.m) <= rel * scale;
}

}  // namespace

TEST_CASE("equal phases recover the symmetric photocurrent") {
  const auto w = photocurrent_combination(0.4, 0.4, 0.9, 0.9);
  CHECK_THAT(w.xi_plus, WithinAbs(1.0, 1e-15));
  CHECK_THAT(w.xi_minus, WithinAbs(1.0, 1e-15));
  CHECK_THAT(w.theta_plus, WithinAbs(1.3, 1e-15));
  CHECK_THAT(w.theta_minus, WithinAbs(-0.5, 1e-15));
}

TEST_CASE("phase choice that removes one sideband") {
  // θ−θ′−(φ−φ′) = π with θ−θ′+(φ−φ′) ≠ π.
  const auto w = photocurrent_combination(kPi + 0.5, 0.0, 0.3, -0.2);
  CHECK_THAT(w.xi_minus, WithinAbs(0.0, 1e-15));
  CHECK(std::abs(w.xi_plus) > 0.1);
}

TEST_CASE("combination matches the expansion of the summed photocurrents") {
  // J^(θ,φ) ∝ e^{i(θ+φ)} ā(ε) + e^{i(θ−φ)} ā(−ε) + h.c.; summing two of them
  // gives ā(ε) the coefficient e^{i(θ+φ)} + e^{i(θ′+φ′)} = 2 ξ+ e^{iθ+}.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  auto check = [](double t, double tp, double f, double fp) {
    const auto w = photocurrent_combination(t, tp, f, fp);
    const cdouble cp = std::exp(cdouble(0, t + f)) + std::exp(cdouble(0, tp + fp));
    const cdouble cm = std::exp(cdouble(0, t - f)) + std::exp(cdouble(0, tp - fp));
    CHECK(std::abs(cp - 2.0 * w.xi_plus * std::exp(cdouble(0, w.theta_plus))) < 1e-14);
    CHECK(std::abs(cm - 2.0 * w.xi_minus * std::exp(cdouble(0, w.theta_minus))) < 1e-14);
    CHECK(std::abs(w.xi_plus) <= 1.0);
    CHECK(std::abs(w.xi_minus) <= 1.0);
  };
  check(0.3, 1.1, 0.2, -0.4);
  for (int k = 0; k < 200; ++k) check(ang(rng), ang(rng), ang(rng), ang(rng));
}

TEST_CASE("symmetric homodyne spectrum does not depend on the filter phase") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int k = 0; k < 200; ++k) {
    const auto c = testsupport::random_nm(rng);
    const double th = ang(rng);
    CHECK_THAT(homodyne_spectrum(c, th, ang(rng)), WithinAbs(homodyne_spectrum(c, th, ang(rng)), 1e-12));
  }
}

TEST_CASE("strategy I") {
  const auto v = strategy_I_nm(spectral::vacuum_model(), 0, 0.4);
  CHECK(v.n_plus == 0.0);
  CHECK(v.n_minus == 0.0);
  CHECK(v.m == cdouble(0.0));
  CHECK_THROWS_AS(strategy_I_nm(spectral::vacuum_model(), 0, 0.0), Error);

  const auto P = model_for(0.0);
  CHECK(spectral::squeezing_S(strategy_I_nm(P, 0, 0.5)) < 1.0);

  const auto Pb = model_for(0.3);
  for (int field : {0, 1}) {
    const auto dup = duplicated_field_model(Pb, field);
    for (double e : {0.2, 0.7, 1.0 + 1e-5, -0.3}) {
      CHECK(close_nm(strategy_I_nm(Pb, field, e), spectral::extract_nm(dup, e), 0.0));
    }
  }
  try {
    strategy_I_nm(P, 0, 0.0);
    FAIL("expected DegenerateFrequency");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateFrequency);
  }
}

TEST_CASE("strategy II reduces to strategy I when the second weight vanishes") {
  const auto P = model_for(0.3);
  for (double e : {0.1, 0.5, 0.99}) {
    CHECK(close_nm(strategy_II_nm(P, e, 1.0, 0.0, 0.0), strategy_I_nm(P, 0, e), 1e-15));
    const auto rotated = strategy_II_nm(P, e, 2.0, 0.0, 0.7);
    const auto ref = strategy_I_nm(P, 0, e);
    CHECK_THAT(rotated.n_plus, WithinRel(ref.n_plus, 1e-14));
    CHECK_THAT(std::abs(rotated.m), WithinRel(std::abs(ref.m), 1e-14));
  }
}

TEST_CASE("optimal collective mode of a two-sided cavity recovers the single-sided cavity") {
  const auto two = testsupport::fig4_params(0.3);
  auto one = two;
  one.kappa1 = two.kappa1 + two.kappa2;
  one.kappa2 = 0.0;
  const auto P2 = optomech::output_spectrum_model(two);
  const auto P1 = optomech::output_spectrum_model(one);
  const double mu2 = std::sqrt(two.kappa2 / two.kappa1);
  for (double e : {0.05, 0.3, 0.5, 0.8, 1.0 + 2e-5, 1.5}) {
    const double lhs = spectral::squeezing_Smin(strategy_II_nm(P2, e, 1.0, mu2, 0.0));
    const double rhs = spectral::squeezing_Smin(strategy_I_nm(P1, 0, e));
    CHECK_THAT(lhs, WithinAbs(rhs, 1e-9 * std::max(1.0, std::abs(rhs))));
  }
}

TEST_CASE("collective modes are normalized and scale invariant") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> mu(-2.0, 2.0);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::uniform_real_distribution<double> lam(0.1, 10.0);
  const auto P = model_for(0.3);
  for (int k = 0; k < 100; ++k) {
    const double m1 = mu(rng), m2 = mu(rng), tc = ang(rng), e = 1.5 * mu(rng) + 1e-3;
    const cdouble comm = collective_commutator(P, e, m1, m2, tc);
    CHECK(std::abs(comm - 1.0) < 1e-9);
    const double l = lam(rng);
    CHECK(close_nm(strategy_II_nm(P, e, l * m1, l * m2, tc), strategy_II_nm(P, e, m1, m2, tc), 1e-13));
  }
  CHECK_THROWS_AS(strategy_II_nm(P, 0.3, 0.0, 0.0, 0.0), Error);
}

TEST_CASE("printed collective-mode formulas agree only on the matching phase slice") {
  const auto P = model_for(0.3);
  const double mu1 = 1.0, mu2 = 0.8, tc = 0.35;
  for (double e : {0.2, 0.6}) {
    const auto ref = strategy_II_nm(P, e, mu1, mu2, tc);
    const auto on = collective_nm_printed(P, e, mu1, mu2, tc, 2.0 * tc, 0.0);
    const double scale = std::max(1.0, ref.n_plus);
    CHECK(std::abs(on.n_plus - ref.n_plus) < 1e-12 * scale);
    CHECK(std::abs(on.n_minus - ref.n_minus) < 1e-12 * scale);
    CHECK(std::abs(on.m - ref.m) < 1e-12 * scale);
    const auto off = collective_nm_printed(P, e, mu1, mu2, tc + 0.6, 2.0 * tc, 0.0);
    CHECK(std::abs(off.n_plus - ref.n_plus) > 1e-6 * scale);
  }
}

TEST_CASE("strategy III") {
  const auto Pa = model_for(0.0);
  for (double e : {0.1, 0.5, 0.9}) {
    const auto c = strategy_III_nm(Pa, e);
    CHECK(c.n_minus == 0.0);
    CHECK(std::abs(c.m) == 0.0);
    CHECK(spectral::squeezing_S(c) >= 1.0);
  }
  const auto Pc = model_for(1.0);
  for (double e : {0.1, 0.5, 0.9, 1.0 + 1e-5}) {
    const auto a = strategy_III_nm(Pc, e);
    const auto b = strategy_I_nm(Pc, 0, e);
    CHECK_THAT(spectral::squeezing_S(a), WithinAbs(spectral::squeezing_S(b), 1e-9));
    CHECK_THAT(spectral::squeezing_Smin(a), WithinAbs(spectral::squeezing_Smin(b), 1e-9));
  }
  const auto Pb = model_for(0.3);
  const Matrix4cd Pe = Pb(0.4), Pme = Pb(-0.4);
  const auto c = strategy_III_nm(Pb, 0.4);
  CHECK(c.n_plus == Pme(2, 0).real());
  CHECK(c.n_minus == Pe(3, 1).real());
  CHECK(c.m == Pe(0, 1));
}

TEST_CASE("heterodyne spectra") {
  const auto vac = heterodyne_T({});
  CHECK(vac.T == 1.0);
  CHECK(vac.T_min == 1.0);
  const TwoModeSpectralCorrelation half{1.0, 1.0, 1.25};
  REQUIRE(spectral::squeezing_S(half) == 0.5);
  CHECK(heterodyne_T(half).T == 0.75);

  const auto Pc = model_for(1.0);
  for (double e : optomech::frequency_grid({-2.0, 2.0, 101, false})) {
    if (e == 0.0) continue;
    const auto c = strategy_III_nm(Pc, e);
    CHECK_THAT(heterodyne_T(c).T_min, WithinAbs(0.5 * (spectral::squeezing_Smin(c) + 1.0), 1e-12));
  }
}

TEST_CASE("heterodyne variance minimized over phases and weights") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 30; ++k) {
    const auto c = testsupport::random_nm(rng);
    double best_sym = 1e300, best = 1e300;
    for (int i = 0; i < 720; ++i) {
      const double th = 2.0 * kPi * i / 720.0;
      best_sym = std::min(best_sym, heterodyne_variance(c, th, 0.0, 0.0, 0.0, 1.0, 1.0));
      for (int j = 0; j < 90; ++j) {
        const double psi = kPi * j / 90.0;
        best = std::min(best, heterodyne_variance(c, th, 0.0, 0.0, 0.0, std::cos(psi), std::sin(psi)));
      }
    }
    const auto T = heterodyne_T(c);
    CHECK(best_sym >= T.T - 1e-12);
    CHECK(best_sym - T.T < 1e-3 * (1.0 + std::abs(c.m)));
    CHECK(best >= T.T_min - 1e-12);
    CHECK(best - T.T_min < 2e-3 * (1.0 + c.n_plus + c.n_minus));
  }
}

TEST_CASE("heterodyne detuning guard") {
  const auto toy = spectral::lorentzian_model(0.1, 1.0, {0.5, 0.0});
  CHECK(check_heterodyne_detuning(toy, 0.05) == DetuningCheck::Invalid);
  CHECK(check_heterodyne_detuning(toy, -0.5) == DetuningCheck::Marginal);
  CHECK(check_heterodyne_detuning(toy, 2.0) == DetuningCheck::Ok);
  CHECK_THROWS_AS(detected_nm(toy, Heterodyne{0.05}, 0.1), Error);
  CHECK(close_nm(detected_nm(toy, Heterodyne{5.0}, 0.1), strategy_III_nm(toy, 0.1), 0.0));
}

TEST_CASE("photocurrent normalization") {
  CHECK_THAT(photocurrent_normalization(0.0, 3.0), WithinAbs(1.0 / std::sqrt(2.0), 1e-15));
  CHECK_THAT(photocurrent_normalization(1.0, 2.0), WithinAbs(std::sqrt(3.0) / 2.0, 1e-15));
  CHECK_THAT(photocurrent_normalization(1e12, 1e6), WithinAbs(1.0, 1e-15));
  CHECK(photocurrent_normalization(1.0, INFINITY) == 1.0);
  double prev = 0.0;
  for (double x = 0.0; x < 1e3; x = 2.0 * x + 0.1) {
    const double n = photocurrent_normalization(x, 1.0);
    CHECK(n >= 1.0 / std::sqrt(2.0) - 1e-15);
    CHECK(n < 1.0);
    CHECK(n > prev);
    prev = n;
  }
  CHECK_THROWS_AS(photocurrent_normalization(-1.0, 1.0), Error);
}

TEST_CASE("every strategy yields non-negative populations on physical models") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::uniform_real_distribution<double> mu(0.0, 2.0);
  for (int k = 0; k < 20; ++k) {
    const auto P = optomech::output_spectrum_model(testsupport::random_stable_params(rng));
    const std::vector<Strategy> strategies{SingleHomodyne{0}, SingleHomodyne{1},
                                           TwoModeHomodyne{mu(rng), mu(rng) + 0.1, ang(rng)}, CrossField{}};
    for (const auto& s : strategies) {
      for (double e : {0.05, 0.4, 0.97, 1.3}) {
        const auto c = detected_nm(P, s, e);
        CHECK(c.n_plus >= -1e-9);
        CHECK(c.n_minus >= -1e-9);
      }
    }
  }
}
