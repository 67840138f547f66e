#pragma once

// Per-mode birth-death rate equations in the Lamb-Dicke regime:
//   dP_n/dt = A+ [n P_{n-1} - (n+1) P_n] + A- [(n+1) P_{n+1} - n P_n]
// so that d<n>/dt = A+ (<n> + 1) - A- <n>.

#include <string>
#include <vector>

#include "crystalcool/cooling_dynamics.hpp"
#include "crystalcool/ion_chain.hpp"

namespace crystalcool {

struct LdCoefficients {
  double frequency = 0.0;
  double heat = 0.0;  // A+
  double cool = 0.0;  // A-
  double eta = 0.0;   // cos(theta0) sqrt(omega_R / nu)

  double relaxation_rate() const { return cool - heat; }
};

std::vector<LdCoefficients> ld_coefficients(const ModeSpectrum& spectrum,
                                            const CoolingParams& params);

struct LDModeState {
  std::vector<double> mean_occupations;
  // populations[beta][n]; empty means "thermal with the given means".
  std::vector<std::vector<double>> populations;

  double energy(const ModeSpectrum& spectrum) const;  // sum nu (<n> + 1/2)
};

// Thermal populations truncated where the geometric tail drops below `tail`.
LDModeState ld_thermal_state(const std::vector<double>& mean_occupations, double tail = 1e-13);

// <n> = A+/(A- - A+); throws ErrorCode::NoSteadyState when A- <= A+.
std::vector<double> ld_steady_occupations(const std::vector<LdCoefficients>& coeffs);

// Closed-form solution of the mean equation.
std::vector<double> ld_mean_solution(const std::vector<LdCoefficients>& coeffs,
                                     const std::vector<double>& n0, double t);

struct LdRun {
  LDModeState state;
  std::vector<std::string> warnings;
  std::size_t steps = 0;
};

// Implicit Euler on the truncated population vectors. Steps are capped at
// max_step_kappa / (A- - A+) per mode.
LdRun ld_evolve(const ModeSpectrum& spectrum, const CoolingParams& params,
                const LDModeState& initial, double t, double max_step_kappa = 1e-2);

}  // namespace crystalcool
