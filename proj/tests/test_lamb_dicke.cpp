#include <doctest.h>

#include <cmath>

#include "crystalcool/errors.hpp"
#include "crystalcool/lamb_dicke_dynamics.hpp"

using namespace crystalcool;

namespace {

CoolingParams ld_params() {
  CoolingParams p;
  p.n_ions = 3;
  p.m_driven = 3;
  p.gamma = 30.0;
  p.detuning = -15.0;
  p.rabi = 1.0;
  p.recoil = 0.05;
  return p;
}

}  // namespace

TEST_CASE("coefficients follow the sideband Lorentzians") {
  const CoolingParams p = ld_params();
  const ModeSpectrum s = chain_modes(ChainConfig{3, 1.0, p.recoil});
  const auto c = ld_coefficients(s, p);
  REQUIRE(c.size() == 3);
  for (std::size_t b = 0; b < 3; ++b) {
    const double nu = s.frequencies[b];
    CHECK(c[b].heat == doctest::Approx(p.recoil / nu * (lorentzian(nu, p) + lorentzian(0.0, p) / 3.0)));
    CHECK(c[b].cool == doctest::Approx(p.recoil / nu * (lorentzian(-nu, p) + lorentzian(0.0, p) / 3.0)));
    CHECK(c[b].cool > c[b].heat);
  }
}

TEST_CASE("long-time populations reach detailed balance") {
  const CoolingParams p = ld_params();
  const ModeSpectrum s = chain_modes(ChainConfig{3, 1.0, p.recoil});
  const auto c = ld_coefficients(s, p);
  const auto steady = ld_steady_occupations(c);
  double slowest = 1e300;
  for (const auto& x : c) slowest = std::min(slowest, x.relaxation_rate());
  const LdRun run = ld_evolve(s, p, ld_thermal_state({0.0, 0.0, 0.0}), 40.0 / slowest);
  for (std::size_t b = 0; b < 3; ++b) {
    CHECK(run.state.mean_occupations[b] == doctest::Approx(steady[b]).epsilon(1e-6));
    double norm = 0.0;
    for (double x : run.state.populations[b]) {
      CHECK(x >= 0.0);
      norm += x;
    }
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    // Geometric ratio A+/A-.
    const auto& pop = run.state.populations[b];
    CHECK(pop[3] / pop[2] == doctest::Approx(c[b].heat / c[b].cool).epsilon(1e-6));
  }
}

TEST_CASE("mean occupations track the closed-form solution") {
  const CoolingParams p = ld_params();
  const ModeSpectrum s = chain_modes(ChainConfig{3, 1.0, p.recoil});
  const auto c = ld_coefficients(s, p);
  const std::vector<double> n0{30.0, 20.0, 10.0};
  const double t = 0.5 / c[0].relaxation_rate();
  const LdRun run = ld_evolve(s, p, ld_thermal_state(n0), t, 1e-4);
  const auto exact = ld_mean_solution(c, n0, t);
  for (std::size_t b = 0; b < 3; ++b)
    CHECK(run.state.mean_occupations[b] == doctest::Approx(exact[b]).epsilon(2e-4));
}

TEST_CASE("total energy approaches N/|C| when the linewidth is large") {
  CoolingParams p = ld_params();
  p.gamma = 100.0;
  p.detuning = -50.0;
  const ModeSpectrum s = chain_modes(ChainConfig{3, 1.0, p.recoil});
  const auto n = ld_steady_occupations(ld_coefficients(s, p));
  double e = 0.0;
  for (std::size_t b = 0; b < 3; ++b) e += s.frequencies[b] * (n[b] + 0.5);
  CHECK(e == doctest::Approx(steady_energy(p)).epsilon(0.01));
  // Per-mode thermal share <n> nu = E/N.
  for (std::size_t b = 0; b < 3; ++b)
    CHECK(s.frequencies[b] * (n[b] + 0.5) == doctest::Approx(e / 3.0).epsilon(0.01));
}

TEST_CASE("no light leaves the state unchanged") {
  CoolingParams p = ld_params();
  p.rabi = 0.0;
  const ModeSpectrum s = chain_modes(ChainConfig{3, 1.0, p.recoil});
  const LDModeState init = ld_thermal_state({3.0, 2.0, 1.0});
  const LdRun run = ld_evolve(s, p, init, 1e4);
  for (std::size_t b = 0; b < 3; ++b) CHECK(run.state.populations[b] == init.populations[b]);
}

TEST_CASE("blue detuning has no steady state") {
  CoolingParams p = ld_params();
  p.detuning = 15.0;
  const ModeSpectrum s = chain_modes(ChainConfig{3, 1.0, p.recoil});
  try {
    ld_steady_occupations(ld_coefficients(s, p));
    FAIL("expected NoSteadyState");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoSteadyState);
  }
}

TEST_CASE("large Lamb-Dicke parameter is flagged") {
  CoolingParams p = ld_params();
  p.recoil = 0.5;
  const ModeSpectrum s = chain_modes(ChainConfig{3, 1.0, p.recoil});
  const LdRun run = ld_evolve(s, p, ld_thermal_state({1.0, 1.0, 1.0}), 1.0);
  CHECK(!run.warnings.empty());
}
