#include <doctest.h>

#include <cmath>
#include <limits>

#include "crystalcool/cooling_dynamics.hpp"
#include "crystalcool/errors.hpp"

using namespace crystalcool;

namespace {

CoolingParams base() {
  CoolingParams p;
  p.gamma = 20.0;
  p.detuning = -10.0;
  p.rabi = 1.5;
  p.recoil = 0.1;
  return p;
}

}  // namespace

TEST_CASE("emission pattern alphas") {
  CHECK(alpha_from_pattern(EmissionPattern::isotropic()) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(alpha_from_pattern(EmissionPattern::dipole_linear()) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(alpha_from_pattern(EmissionPattern::dipole_circular()) == doctest::Approx(0.4).epsilon(1e-14));
  // A tabulated isotropic pattern integrates exactly piecewise.
  const auto table = EmissionPattern::custom({-1.0, 0.0, 1.0}, {0.5, 0.5, 0.5});
  CHECK(alpha_from_pattern(table) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(alpha_from_pattern(EmissionPattern::custom({-1.0, 1.0}, {1.0, 1.0})), Error);
  CHECK(EmissionPattern::from_name("dipole_linear").name() == "dipole_linear");
  CHECK_THROWS_AS(EmissionPattern::from_name("quadrupole"), Error);
}

TEST_CASE("Lorentzian peak, symmetry and slope") {
  CoolingParams p = base();
  p.m_driven = 1;
  CHECK(lorentzian(p.detuning, p) == doctest::Approx(p.rabi * p.rabi / p.gamma));
  CHECK(lorentzian(p.detuning + 3.3, p) == doctest::Approx(lorentzian(p.detuning - 3.3, p)));
  const double h = 1e-5;
  const double fd = (lorentzian(h, p) - lorentzian(-h, p)) / (2 * h);
  CHECK(lorentzian_slope0(p) == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("drift constant and time scale") {
  CoolingParams p = base();
  const FpCoefficients fp = fp_coefficients(p);
  CHECK(fp.c < 0.0);
  // At delta = -gamma/2: L'(0)/L(0) = 8 delta/(4 delta^2 + gamma^2) = -2/gamma.
  CHECK(fp.c == doctest::Approx(1.5 * -2.0 / p.gamma).epsilon(1e-12));
  CHECK(fp.tau_scale == doctest::Approx(p.recoil * (4.0 / 3.0) * lorentzian(0.0, p)));
  CHECK(fp.diffusion(0.0) == 0.0);
  CHECK(fp.drift(0.0) == 1.0);
  p.detuning = 4.0;
  CHECK(fp_coefficients(p).c > 0.0);
  p.cos_theta0 = 0.0;
  try {
    fp_coefficients(p);
    FAIL("expected NoAxialProjection");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoAxialProjection);
  }
}

TEST_CASE("steady distribution: normalization, mean and N = 1 shape") {
  CoolingParams p = base();
  for (int n : {1, 2, 5}) {
    p.n_ions = n;
    p.m_driven = 1;
    const double c = fp_coefficients(p).c;
    const EnergyGrid grid = EnergyGrid::spanning(0.005, 60.0 * n / std::abs(c), 0.01);
    const EnergyDistribution d = fp_steady(p, grid);
    CHECK(d.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.mean_energy() == doctest::Approx(n / std::abs(c)).epsilon(1e-4));
    CHECK(steady_energy(p) == doctest::Approx(n / std::abs(c)).epsilon(1e-12));
  }
  p.n_ions = 1;
  const double c = fp_coefficients(p).c;
  CHECK(fp_steady_density(p, 2.0) == doctest::Approx(-c * std::exp(2.0 * c)).epsilon(1e-12));
  p.detuning = 5.0;
  CHECK_THROWS_AS(fp_steady(p, EnergyGrid(0.5, 1.0, 10)), Error);
}

TEST_CASE("steady energy: optimum at -gamma/2, (1 + alpha) gamma / 4 per ion, linear in N") {
  CoolingParams p = base();
  const double e1 = steady_energy(p);
  CHECK(e1 == doctest::Approx((1.0 + 1.0 / 3.0) * p.gamma / 4.0).epsilon(1e-12));
  for (int n : {2, 3, 5, 10}) {
    p.n_ions = n;
    CHECK(steady_energy(p) == doctest::Approx(n * e1).epsilon(1e-12));
  }
  p.n_ions = 3;
  p.m_driven = 2;
  p.pattern = EmissionPattern::dipole_linear();
  p.cos_theta0 = 0.6;
  double best = 0.0, best_e = std::numeric_limits<double>::infinity();
  for (double d = -3.0 * p.gamma; d <= -0.05 * p.gamma; d += p.gamma / 2000.0) {
    p.detuning = d;
    if (steady_energy(p) < best_e) {
      best_e = steady_energy(p);
      best = d;
    }
  }
  CHECK(std::abs(best + p.gamma / 2.0) <= p.gamma / 2000.0);
}

TEST_CASE("time evolution of the thermal scale") {
  CoolingParams p = base();
  p.n_ions = 3;
  const double u0 = 40.0;
  CHECK(fp_evolution(p, u0, 0.0).mean_energy() == doctest::Approx(3.0 * u0));
  const double late = fp_evolution(p, u0, 200.0 / cooling_rate(p)).mean_energy();
  CHECK(late == doctest::Approx(steady_energy(p)).epsilon(1e-12));
  // Excess decays at exactly Gamma_cool.
  const double t = 0.7 / cooling_rate(p);
  const double excess = fp_evolution(p, u0, t).mean_energy() - steady_energy(p);
  CHECK(excess == doctest::Approx((3.0 * u0 - steady_energy(p)) * std::exp(-0.7)).epsilon(1e-12));
  CHECK_THROWS_AS(fp_evolution(p, -1.0, 1.0), Error);
}

TEST_CASE("cooling rate formula") {
  CoolingParams p;
  p.gamma = 30.0;
  p.detuning = -15.0;
  p.rabi = 2.0;
  p.recoil = 0.3;
  CHECK(cooling_rate(p) == doctest::Approx(2.0 * 0.3 * 4.0 / 900.0).epsilon(1e-12));
  const double g1 = cooling_rate(p);
  p.rabi = 4.0;
  CHECK(cooling_rate(p) == doctest::Approx(4.0 * g1));
  p.rabi = 2.0;
  p.n_ions = 4;
  for (int m = 1; m <= 4; ++m) {
    p.m_driven = m;
    CHECK(cooling_rate(p) == doctest::Approx(m * g1 / 4.0).epsilon(1e-14));
  }
  CHECK(cooling_rate(p) == doctest::Approx(2.0 * p.recoil * std::abs(lorentzian_slope0(p)) / p.n_ions));
}

TEST_CASE("relaxation fit recovers an exact exponential") {
  std::vector<std::pair<double, double>> traj;
  for (int i = 0; i <= 400; ++i) traj.emplace_back(i * 0.05, 3.0 + 7.0 * std::exp(-0.42 * i * 0.05));
  CHECK(fit_relaxation_rate(traj, 3.0) == doctest::Approx(0.42).epsilon(1e-10));
}

TEST_CASE("parameter validation") {
  CoolingParams p = base();
  p.gamma = -1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = base();
  p.m_driven = 2;
  CHECK_THROWS_AS(p.validate(), Error);
  p = base();
  p.rabi = 10.0;
  CHECK(!p.validate().empty());
}

TEST_CASE("thermal distribution on a grid") {
  const EnergyGrid grid = EnergyGrid::spanning(0.05, 400.0, 0.1);
  const EnergyDistribution d = thermal_distribution(3, 5.0, grid);
  CHECK(d.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.mean_energy() == doctest::Approx(15.0).epsilon(1e-4));
  CHECK(d.l1_distance(d) == 0.0);
}
