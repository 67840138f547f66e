#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>

#include <cmath>
#include <random>

#include "crystalcool/errors.hpp"
#include "crystalcool/franck_condon.hpp"

using namespace crystalcool;
using Big = boost::multiprecision::cpp_dec_float_50;

namespace {

// |<l|D|n>| from the explicit Laguerre sum in 50-digit arithmetic.
double fc_magnitude_oracle(int n, int l, double eta) {
  const int r = std::min(n, l), d = std::abs(l - n);
  const Big x = Big(eta) * Big(eta);
  Big lag = 0;
  // L_r^d(x) = sum_m (-1)^m C(r+d, r-m) x^m / m!
  for (int m = 0; m <= r; ++m) {
    Big c = 1;
    for (int i = 1; i <= r - m; ++i) c = c * Big(d + m + i) / Big(i);
    Big term = c * pow(x, m);
    for (int i = 2; i <= m; ++i) term /= i;
    lag += (m % 2 ? -term : term);
  }
  Big ratio = 1;  // r!/(r+d)!
  for (int i = r + 1; i <= r + d; ++i) ratio /= i;
  const Big v = exp(-x / 2) * sqrt(ratio) * pow(Big(eta), d) * lag;
  return static_cast<double>(abs(v));
}

// Harmonic-oscillator wavefunctions in units of the ground-state width with a + a^dagger = sqrt(2) x.
double psi(int n, double x) {
  const double g = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
  return n == 0 ? g : std::sqrt(2.0) * x * g;
}

}  // namespace

TEST_CASE("pure Gaussian factor for the ground state") {
  CHECK(std::abs(fc_single(0, 0, 0.3)) == doctest::Approx(std::exp(-0.045)).epsilon(1e-14));
  CHECK(fc_single(0, 0, 0.3).imag() == doctest::Approx(0.0));
}

TEST_CASE("zero displacement is the identity") {
  for (int n = 0; n < 12; ++n)
    for (int l = 0; l < 12; ++l) CHECK(std::abs(fc_single(n, l, 0.0)) == doctest::Approx(n == l ? 1.0 : 0.0));
}

TEST_CASE("n = l = 1 against the displaced-wavefunction overlap") {
  const double eta = 0.5;
  const double expected = std::exp(-0.125) * 0.75;
  CHECK(fc_single(1, 1, eta).real() == doctest::Approx(expected).epsilon(1e-14));
  using boost::math::quadrature::gauss_kronrod;
  auto overlap = [&](int l, int n, bool imag) {
    return gauss_kronrod<double, 61>::integrate(
        [&](double x) {
          const double ph = std::sqrt(2.0) * eta * x;
          return psi(l, x) * psi(n, x) * (imag ? std::sin(ph) : std::cos(ph));
        },
        -14.0, 14.0, 10, 1e-14);
  };
  CHECK(overlap(1, 1, false) == doctest::Approx(expected).epsilon(1e-10));
  // Phase convention: <1|D|0> = i eta exp(-eta^2/2).
  const auto a10 = fc_single(0, 1, eta);
  CHECK(a10.real() == doctest::Approx(0.0));
  CHECK(a10.imag() == doctest::Approx(overlap(1, 0, true)).epsilon(1e-10));
}

TEST_CASE("log-domain amplitudes agree with 50-digit Laguerre sums") {
  double worst = 0.0;
  for (int n = 0; n <= 30; n += 3)
    for (int l = 0; l <= 30; l += 2)
      for (double eta : {0.05, 0.3, 0.9, 1.5, 2.0}) {
        const double exact = fc_magnitude_oracle(n, l, eta);
        const double got = std::abs(fc_single(n, l, eta));
        const double err = std::abs(got - exact);
        CHECK(err <= 1e-9 * exact + 1e-15);
        worst = std::max(worst, err);
      }
  CHECK(worst < 1e-9);
}

TEST_CASE("large occupations stay finite and complete") {
  const double eta = 0.4;
  const int n = 400;
  double sum = 0.0;
  for (int l = 0; l <= 900; ++l) {
    const double p = fc_probability(n, l, eta);
    REQUIRE(std::isfinite(p));
    sum += p;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("single-mode completeness") {
  for (int n : {0, 3, 17})
    for (double eta : {0.1, 0.8, 1.7}) {
      double sum = 0.0;
      for (int l = 0; l <= 300; ++l) sum += fc_probability(n, l, eta);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("phase advances by i per quantum of displacement") {
  const auto a = fc_single_parts(2, 5, 0.3);
  CHECK(a.quarter_turns % 4 == 3);
  CHECK(std::abs(fc_single(5, 2, 0.3) - fc_single(2, 5, 0.3)) < 1e-15);
}

TEST_CASE("multi-mode amplitude factorizes") {
  const std::vector<double> nu{1.0, std::sqrt(3.0)};
  const FockState n({2, 1}, nu), l({3, 0}, nu);
  const std::vector<double> eta{0.2, -0.35};
  const auto prod = fc_single(2, 3, 0.2) * fc_single(1, 0, -0.35);
  CHECK(std::abs(fc_multi(n, l, eta) - prod) < 1e-15);
  const std::vector<double> zero{0.0, 0.0};
  CHECK(std::abs(fc_multi(n, n, zero)) == doctest::Approx(1.0));
  CHECK(std::abs(fc_multi(n, l, zero)) == doctest::Approx(0.0));
  const std::vector<double> short_row{0.1};
  CHECK_THROWS_AS(fc_multi(n, l, short_row), Error);
  CHECK(n.energy() == doctest::Approx(2.5 + 1.5 * std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("brute-force moments reproduce the closed forms") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> occ(0, 30);
  for (int ions = 1; ions <= 3; ++ions) {
    const ChainConfig c{ions, 1.0, 0.15};
    const ModeSpectrum s = chain_modes(c);
    for (int k = 0; k < 5; ++k) {
      std::vector<int> o(static_cast<std::size_t>(ions));
      for (int& x : o) x = occ(rng);
      const FockState n(o, s.frequencies);
      const MomentResult m = moments_bruteforce(n, s, c, 0.9);
      CHECK(m.completeness > 1.0 - 1e-10);
      CHECK(m.m1 == doctest::Approx(moment1_closed(c, 0.9)).epsilon(1e-9));
      CHECK(m.m2 == doctest::Approx(moment2_closed_average(n, c, 0.9)).epsilon(1e-9));
      for (std::size_t j = 0; j < static_cast<std::size_t>(ions); ++j) {
        CHECK(m.m1_per_ion[j] == doctest::Approx(0.15 * 0.81).epsilon(1e-9));
        CHECK(m.m2_per_ion[j] == doctest::Approx(moment2_closed_ion(n, s, c, 0.9, j)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("truncation shortfall is reported") {
  const ChainConfig c{1, 1.0, 4.0};
  const ModeSpectrum s = chain_modes(c);
  try {
    moments_bruteforce(FockState({40}, s.frequencies), s, c, 1.0, 5);
    FAIL("expected TruncationInsufficient");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TruncationInsufficient);
  }
}

TEST_CASE("shell coupling is symmetric and non-negative") {
  const ChainConfig c{2, 1.0, 1.0};
  const ModeSpectrum s = chain_modes(c);
  const ShellCoupling ab = average_coupling_bruteforce(20.0, 23.0, 2.0, s, c, 1.0);
  const ShellCoupling ba = average_coupling_bruteforce(23.0, 20.0, 2.0, s, c, 1.0);
  CHECK(ab.q > 0.0);
  CHECK(ab.q == doctest::Approx(ba.q).epsilon(1e-12));
  CHECK(ab.d_from == ba.d_to);
  CHECK_THROWS_AS(average_coupling_bruteforce(20.0, 23.0, 2.0, s, c, 1.0, 10), Error);
}

TEST_CASE("Lamb-Dicke weights are the leading order of the exact probabilities") {
  const std::vector<double> nu{1.0, std::sqrt(3.0)};
  const FockState n({3, 1}, nu);
  const std::vector<double> eta{0.02, 0.015};
  const LdWeights w = ld_weights(n, eta);
  CHECK(!w.outside_regime);
  CHECK(w.total() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(w.blue[0] == doctest::Approx(fc_probability(3, 4, 0.02)).epsilon(1e-2));
  CHECK(w.red[1] == doctest::Approx(fc_probability(1, 0, 0.015)).epsilon(1e-2));
  CHECK(w.carrier == doctest::Approx(fc_probability(3, 3, 0.02) * fc_probability(1, 1, 0.015)).epsilon(1e-5));
  const std::vector<double> big{0.5, 0.1};
  CHECK(ld_weights(n, big).outside_regime);
}
