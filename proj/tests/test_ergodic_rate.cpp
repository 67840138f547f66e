#include <doctest.h>

#include <cmath>
#include <numeric>

#include "crystalcool/ergodic_kernel.hpp"
#include "crystalcool/ergodic_rate.hpp"
#include "crystalcool/errors.hpp"

using namespace crystalcool;

namespace {

CoolingParams small_params() {
  CoolingParams p;
  p.n_ions = 2;
  p.gamma = 20.0;
  p.detuning = -10.0;
  p.rabi = 1.0;
  p.recoil = 0.2;
  return p;
}

}  // namespace

TEST_CASE("deposition keeps mass and mean energy") {
  const EnergyGrid grid = EnergyGrid::spanning(0.25, 200.0, 0.5);
  for (int n : {1, 2, 7})
    for (double e : {3.0, 40.0}) {
      const Deposit d = deposit_kernel(grid, e, 0.7, n);
      double mass = d.leaked, mean = 0.0;
      for (const auto& [i, w] : d.weights) {
        mass += w;
        mean += w * grid.centers()[i];
      }
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(mean == doctest::Approx(e + 0.7).epsilon(1e-12));
    }
}

TEST_CASE("weighted deposition integrates the weight against the kernel") {
  const EnergyGrid grid = EnergyGrid::spanning(0.25, 200.0, 0.5);
  const KernelParams p{30.0, 0.5, 3};
  const Deposit d = deposit_kernel(grid, 30.0, 0.5, 3, [](double x) { return x; });
  double total = 0.0;
  for (const auto& [i, w] : d.weights) total += w;
  CHECK(total == doctest::Approx(p.center()).epsilon(1e-12));
}

TEST_CASE("generator columns sum to zero") {
  const EnergyGrid grid = EnergyGrid::spanning(0.5, 150.0, 1.0);
  const ErgodicRateEquation eq(grid, small_params());
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(grid.size()));
  const Eigen::VectorXd col_sums = eq.generator().transpose() * ones;
  CHECK(col_sums.cwiseAbs().maxCoeff() < 1e-15 * eq.max_loss_rate() * 10);
  for (double l : eq.loss_rates()) CHECK(l >= 0.0);
}

TEST_CASE("probability is conserved and densities stay non-negative") {
  const EnergyGrid grid = EnergyGrid::spanning(0.5, 150.0, 1.0);
  const CoolingParams p = small_params();
  const ErgodicRateEquation eq(grid, p);
  const EnergyDistribution p0 = thermal_distribution(2, 10.0, grid);
  const ErgodicRun run = eq.evolve(p0, 2000.0, eq.max_stable_dt());
  CHECK(run.max_norm_error < 1e-9);
  CHECK(run.min_density > -1e-12);
  CHECK(run.final.norm() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(run.trajectory.front().first == 0.0);
  CHECK(run.trajectory.back().first == doctest::Approx(2000.0));
  // The mean energy decreases from a hot start.
  CHECK(run.trajectory.back().second < run.trajectory.front().second);
}

TEST_CASE("zero Rabi frequency freezes the distribution") {
  CoolingParams p = small_params();
  p.rabi = 0.0;
  const EnergyGrid grid = EnergyGrid::spanning(0.5, 100.0, 1.0);
  const ErgodicRateEquation eq(grid, p);
  const EnergyDistribution p0 = thermal_distribution(2, 8.0, grid);
  const ErgodicRun run = eq.evolve(p0, 50.0, 1.0);
  CHECK(run.final.l1_distance(p0) == 0.0);
}

TEST_CASE("step-size guard") {
  const EnergyGrid grid = EnergyGrid::spanning(0.5, 100.0, 1.0);
  const ErgodicRateEquation eq(grid, small_params());
  const EnergyDistribution p0 = thermal_distribution(2, 8.0, grid);
  try {
    eq.evolve(p0, 100.0, 2.0 * eq.max_stable_dt());
    FAIL("expected StepTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StepTooLarge);
  }
}

TEST_CASE("steady state approaches the Fokker-Planck solution when recoil << linewidth") {
  CoolingParams p = small_params();
  p.n_ions = 1;
  p.recoil = 0.1;  // omega_R / gamma = 0.005
  const double e_inf = steady_energy(p);
  // The remaining bias is first order in the cell width; 0.125 leaves about 1%.
  const EnergyGrid grid = EnergyGrid::spanning(0.0625, 40.0 * e_inf, 0.125);
  const ErgodicRateEquation eq(grid, p);
  const EnergyDistribution s = eq.steady_state();
  CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.l1_distance(fp_steady(p, grid)) < 0.05);
  CHECK(s.mean_energy() == doctest::Approx(e_inf).epsilon(0.02));
  // The generator annihilates its own steady state.
  Eigen::VectorXd mass(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) mass(static_cast<Eigen::Index>(i)) = s.p[i] * grid.delta_e();
  CHECK((eq.generator() * mass).cwiseAbs().maxCoeff() < 1e-12 * eq.max_loss_rate());
}

TEST_CASE("leak past the grid top is flagged") {
  const EnergyGrid grid = EnergyGrid::spanning(0.5, 30.0, 1.0);
  const ErgodicRateEquation eq(grid, small_params());
  const EnergyDistribution p0 = thermal_distribution(2, 10.0, grid);
  const ErgodicRun run = eq.evolve(p0, 100.0, eq.max_stable_dt());
  CHECK(run.max_leak_fraction > 1e-6);
  bool flagged = false;
  for (const auto& w : run.warnings) flagged = flagged || w.find("leak") != std::string::npos;
  CHECK(flagged);
}
