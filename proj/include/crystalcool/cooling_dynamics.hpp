#pragma once

// Laser parameters, the Lorentzian response and the analytic Fokker-Planck
// solutions for the total motional energy.

#include <string>
#include <utility>
#include <vector>

#include "crystalcool/spectrum.hpp"

namespace crystalcool {

class EmissionPattern {
 public:
  enum class Kind { Isotropic, DipoleLinear, DipoleCircular, Custom };

  static EmissionPattern isotropic() { return EmissionPattern(Kind::Isotropic); }
  static EmissionPattern dipole_linear() { return EmissionPattern(Kind::DipoleLinear); }
  static EmissionPattern dipole_circular() { return EmissionPattern(Kind::DipoleCircular); }
  // Piecewise-linear N(c) through (c_i, N_i); c must span [-1, 1] in ascending order.
  static EmissionPattern custom(std::vector<double> c, std::vector<double> density);
  // "isotropic", "dipole_linear", "dipole_circular".
  static EmissionPattern from_name(const std::string& name);

  Kind kind() const { return kind_; }
  std::string name() const;
  double density(double c) const;  // N(c), c = cos(theta)
  const std::vector<double>& table_c() const { return table_c_; }

 private:
  explicit EmissionPattern(Kind kind) : kind_(kind) {}
  Kind kind_;
  std::vector<double> table_c_;
  std::vector<double> table_n_;
};

// alpha = int_{-1}^{1} c^2 N(c) dc. Throws if N is not normalized to 1e-6.
double alpha_from_pattern(const EmissionPattern& pattern);
double pattern_norm(const EmissionPattern& pattern);

// All rates in units of nu_1, energies in hbar nu_1.
struct CoolingParams {
  double gamma = 25.0;
  double detuning = -12.5;
  double rabi = 1.0;
  double recoil = 0.2;
  double cos_theta0 = 1.0;
  EmissionPattern pattern = EmissionPattern::isotropic();
  int m_driven = 1;
  int n_ions = 1;

  // Hard violations throw; soft regime checks come back as warnings.
  std::vector<std::string> validate() const;
  double alpha() const { return alpha_from_pattern(pattern); }
};

// L(x) = M Omega^2 gamma / (4 (x - delta)^2 + gamma^2).
double lorentzian(double x, const CoolingParams& params);
// dL/dx at x = 0, i.e. 8 M Omega^2 gamma delta / (4 delta^2 + gamma^2)^2.
double lorentzian_slope0(const CoolingParams& params);

struct FpCoefficients {
  double c = 0.0;          // 2 cos^2/(cos^2 + alpha) L'(0)/L(0)
  double tau_scale = 0.0;  // tau = tau_scale * t
  int n_ions = 1;

  double drift(double e) const { return 1.0 + c * e / n_ions; }  // A(E)
  double diffusion(double e) const { return 2.0 * e / n_ions; }  // B(E)
};

FpCoefficients fp_coefficients(const CoolingParams& params);

// Population density on a grid: sum_i p_i delta_e == 1.
struct EnergyDistribution {
  EnergyGrid grid;
  std::vector<double> p;

  double norm() const;
  double mean_energy() const;
  double l1_distance(const EnergyDistribution& other) const;
};

// Cell-averaged Gamma(N, scale) distribution E^(N-1) exp(-E/scale), normalized on the grid.
EnergyDistribution thermal_distribution(int n_ions, double scale, const EnergyGrid& grid);

// P0(E) = |C|^N E^(N-1) exp(C E) / Gamma(N).
double fp_steady_density(const CoolingParams& params, double e);
EnergyDistribution fp_steady(const CoolingParams& params, const EnergyGrid& grid);

// <E> = N/|C| = N gamma (alpha + cos^2)/(8 cos^2) (gamma/(2|delta|) + 2|delta|/gamma).
double steady_energy(const CoolingParams& params);

struct FpEvolution {
  double u = 0.0;  // thermal scale U(t)
  double mean_energy() const { return n_ions * u; }
  int n_ions = 1;
};

// U(t) = (U0 + 1/C) exp(2 omega_R cos^2 L'(0) t / N) - 1/C, so that U(0) = U0 and
// U(t -> inf) = 1/|C|.
FpEvolution fp_evolution(const CoolingParams& params, double u0, double t);
EnergyDistribution fp_evolution_distribution(const CoolingParams& params, double u0, double t,
                                             const EnergyGrid& grid);

// Gamma_cool = 2 omega_R cos^2 |L'(0)| / N
//            = (M/N) 16 omega_R cos^2 Omega^2 gamma |delta| / (4 delta^2 + gamma^2)^2.
double cooling_rate(const CoolingParams& params);

// Least-squares slope of log(<E>(t) - e_inf) over the part of the trajectory where
// the excess lies between `lo` and `hi` times its initial value.
double fit_relaxation_rate(const std::vector<std::pair<double, double>>& trajectory,
                           double e_inf, double lo = 0.05, double hi = 0.8);

}  // namespace crystalcool
