#pragma once

// Coarse-grained rate equation for the population P(E, t) of energy cells.
//
// Absorption from E moves the crystal with the kernel f_E^(k_z) weighted by
// L(E' - E); spontaneous emission then redistributes with f^(k cos(theta))
// averaged over the emission pattern. Both kernels are deposited onto the cell
// centres with linear (cloud-in-cell) weights computed from exact partial moments,
// so each deposited transition keeps the kernel's mean energy. The loss of a
// cell is the column sum of the gain matrix, which conserves probability exactly.

#include <Eigen/SparseCore>

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "crystalcool/cooling_dynamics.hpp"

namespace crystalcool {

struct ErgodicOptions {
  std::size_t angular_nodes = 32;
  double dt_safety = 0.1;      // dt <= dt_safety / max loss rate
  double leak_warning = 1e-6;  // flagged when leaked gain / total gain exceeds this
};

struct ErgodicRun {
  EnergyDistribution final;
  std::vector<std::pair<double, double>> trajectory;  // (t, <E>)
  double max_norm_error = 0.0;  // max |sum P dE - 1| over steps
  double min_density = 0.0;
  double max_leak_fraction = 0.0;
  std::size_t steps = 0;
  std::vector<std::string> warnings;
};

class ErgodicRateEquation {
 public:
  ErgodicRateEquation(const EnergyGrid& grid, const CoolingParams& params,
                      const ErgodicOptions& options = {});

  const EnergyGrid& grid() const { return grid_; }
  const CoolingParams& params() const { return params_; }
  // Generator W with dP/dt = W P on cell masses; columns sum to zero.
  const Eigen::SparseMatrix<double>& generator() const { return generator_; }
  const std::vector<double>& loss_rates() const { return loss_; }
  const std::vector<double>& leak_rates() const { return leak_; }
  double max_loss_rate() const;
  double max_stable_dt() const;

  // Explicit Euler from p0 to t_final. Throws ErrorCode::StepTooLarge when dt
  // exceeds max_stable_dt() and ErrorCode::NegativeDensity below -1e-12.
  ErgodicRun evolve(const EnergyDistribution& p0, double t_final, double dt,
                    std::size_t record_every = 1) const;

  // Null vector of the generator, normalized.
  EnergyDistribution steady_state() const;

  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  EnergyGrid grid_;
  CoolingParams params_;
  ErgodicOptions options_;
  Eigen::SparseMatrix<double> generator_;
  std::vector<double> loss_;
  std::vector<double> leak_;
  std::vector<std::string> warnings_;
};

// Cloud-in-cell deposition of the kernel starting at `e` onto grid centres. With a
// weight w, each piece carries int f(E') w(E') dE' and keeps its first moment; the
// weighted integrals use Gauss-Legendre in u with E' = centre + s sin u.
struct Deposit {
  std::vector<std::pair<std::size_t, double>> weights;
  double leaked = 0.0;  // mass beyond the upper grid edge
};
Deposit deposit_kernel(const EnergyGrid& grid, double e, double recoil, int n_ions,
                       const std::function<double(double)>& weight = {});

ErgodicRun evolve_ergodic(const EnergyDistribution& p0, const CoolingParams& params,
                          const ModeSpectrum& spectrum, double t_final, double dt,
                          std::size_t record_every = 1);

}  // namespace crystalcool
