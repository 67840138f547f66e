#pragma once

// Axial normal modes of a linear Coulomb crystal of equal ions.
//
// Natural units throughout: hbar = 1, the axial trap frequency nu_1 = 1, energies
// in units of hbar*nu_1 and lengths in units of l = (e^2 / 4 pi eps0 m nu^2)^(1/3).

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace crystalcool {

struct ChainConfig {
  int n_ions = 1;
  double axial_frequency = 1.0;
  double recoil_frequency = 0.0;  // omega_R = hbar k^2 / 2m, full |k|

  void validate() const;
};

struct EquilibriumPositions {
  std::vector<double> positions;  // ascending, dimensionless
  double residual = 0.0;          // max-norm of the force at the solution
};

// Symmetric N x N curvature matrix of the dimensionless potential.
using HessianMatrix = Eigen::MatrixXd;

struct ModeSpectrum {
  std::vector<double> frequencies;  // ascending, units of nu_1
  // eigenvectors(j, alpha) = b_j^alpha; columns are orthonormal mode vectors.
  Eigen::MatrixXd eigenvectors;

  std::size_t size() const { return frequencies.size(); }
  double ground_energy() const;   // sum_alpha nu_alpha / 2
  double frequency_product() const;
};

// eta(j, alpha): Lamb-Dicke parameter of ion j for mode alpha.
struct LambDickeSet {
  Eigen::MatrixXd eta;

  std::vector<double> row(std::size_t ion) const;
};

// Dimensionless potential sum u_j^2/2 + (1/2) sum_{j!=k} 1/|u_j - u_k|.
double chain_potential(const std::vector<double>& positions);
std::vector<double> chain_force_residual(const std::vector<double>& positions);

// Damped Newton iteration from the uniform-spacing guess.
// Throws ErrorCode::NonConvergence with the residual norm if the cap is hit.
EquilibriumPositions solve_equilibrium(const ChainConfig& config,
                                       int max_iterations = 200,
                                       double tolerance = 1e-12);

// Analytic Hessian at an equilibrium. Throws ErrorCode::NotEquilibrium when the
// force residual exceeds `tolerance`.
HessianMatrix hessian(const EquilibriumPositions& equilibrium, double tolerance = 1e-10);

// Frequencies nu_alpha = sqrt(eigenvalue) in ascending order. Each eigenvector is
// signed so that its largest-magnitude component is positive.
ModeSpectrum solve_modes(const HessianMatrix& v);

// Convenience: equilibrium -> Hessian -> modes.
ModeSpectrum chain_modes(const ChainConfig& config);

// eta_j^alpha = cos_theta0 * b_j^alpha * sqrt(omega_R / nu_alpha).
LambDickeSet lamb_dicke(const ModeSpectrum& spectrum, const ChainConfig& config,
                        double cos_theta0);

}  // namespace crystalcool
