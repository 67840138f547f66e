#include "crystalcool/ion_chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "crystalcool/errors.hpp"

namespace crystalcool {

void ChainConfig::validate() const {
  require(n_ions >= 1, "n_ions must be >= 1");
  require(axial_frequency > 0.0, "axial_frequency must be > 0");
  require(recoil_frequency >= 0.0, "recoil_frequency must be >= 0");
}

double ModeSpectrum::ground_energy() const {
  return 0.5 * std::accumulate(frequencies.begin(), frequencies.end(), 0.0);
}

double ModeSpectrum::frequency_product() const {
  return std::accumulate(frequencies.begin(), frequencies.end(), 1.0,
                         std::multiplies<>());
}

std::vector<double> LambDickeSet::row(std::size_t ion) const {
  std::vector<double> out(static_cast<std::size_t>(eta.cols()));
  for (Eigen::Index a = 0; a < eta.cols(); ++a)
    out[static_cast<std::size_t>(a)] = eta(static_cast<Eigen::Index>(ion), a);
  return out;
}

double chain_potential(const std::vector<double>& u) {
  double v = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    v += 0.5 * u[j] * u[j];
    for (std::size_t k = j + 1; k < u.size(); ++k) v += 1.0 / std::abs(u[j] - u[k]);
  }
  return v;
}

std::vector<double> chain_force_residual(const std::vector<double>& u) {
  std::vector<double> grad(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    double g = u[j];
    for (std::size_t k = 0; k < u.size(); ++k) {
      if (k == j) continue;
      const double d = u[j] - u[k];
      g -= std::copysign(1.0 / (d * d), d);
    }
    grad[j] = g;
  }
  return grad;
}

namespace {

double max_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Eigen::MatrixXd curvature(const std::vector<double>& u) {
  const auto n = static_cast<Eigen::Index>(u.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    h(j, j) = 1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == j) continue;
      const double d = std::abs(u[static_cast<std::size_t>(j)] - u[static_cast<std::size_t>(k)]);
      const double c = 2.0 / (d * d * d);
      h(j, j) += c;
      h(j, k) = -c;
    }
  }
  return h;
}

}  // namespace

EquilibriumPositions solve_equilibrium(const ChainConfig& config, int max_iterations,
                                       double tolerance) {
  config.validate();
  const auto n = static_cast<std::size_t>(config.n_ions);
  std::vector<double> u(n);
  // Uniform spacing guess; the spacing scale of a long chain shrinks like N^(-0.56).
  const double spacing = n > 1 ? 2.0 * std::pow(static_cast<double>(n), -0.56) : 0.0;
  for (std::size_t j = 0; j < n; ++j)
    u[j] = (static_cast<double>(j) - 0.5 * static_cast<double>(n - 1)) * spacing;

  auto residual = chain_force_residual(u);
  double norm = max_norm(residual);
  for (int it = 0; it < max_iterations && norm > tolerance; ++it) {
    const Eigen::MatrixXd h = curvature(u);
    Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(residual.data(),
                                                          static_cast<Eigen::Index>(n));
    const Eigen::VectorXd step = h.ldlt().solve(g);
    // Backtrack until ordering is kept and the residual decreases.
    double scale = 1.0;
    std::vector<double> trial(n);
    for (int k = 0; k < 60; ++k) {
      for (std::size_t j = 0; j < n; ++j)
        trial[j] = u[j] - scale * step(static_cast<Eigen::Index>(j));
      const bool ordered = std::is_sorted(trial.begin(), trial.end()) &&
                           std::adjacent_find(trial.begin(), trial.end()) == trial.end();
      if (ordered && max_norm(chain_force_residual(trial)) < norm) break;
      scale *= 0.5;
    }
    u = trial;
    residual = chain_force_residual(u);
    norm = max_norm(residual);
  }
  if (!(norm <= tolerance)) {
    std::ostringstream msg;
    msg << "equilibrium solver did not converge for N=" << n << ", residual " << norm;
    fail(ErrorCode::NonConvergence, msg.str());
  }
  // Symmetrize to remove round-off drift of the centre of mass.
  for (std::size_t j = 0; j < n / 2; ++j) {
    const double a = 0.5 * (u[n - 1 - j] - u[j]);
    u[j] = -a;
    u[n - 1 - j] = a;
  }
  if (n % 2 == 1) u[n / 2] = 0.0;
  return {u, max_norm(chain_force_residual(u))};
}

HessianMatrix hessian(const EquilibriumPositions& equilibrium, double tolerance) {
  const double r = max_norm(chain_force_residual(equilibrium.positions));
  if (!(r <= tolerance)) {
    std::ostringstream msg;
    msg << "positions are not an equilibrium, force residual " << r;
    fail(ErrorCode::NotEquilibrium, msg.str());
  }
  return curvature(equilibrium.positions);
}

ModeSpectrum solve_modes(const HessianMatrix& v) {
  require(v.rows() == v.cols() && v.rows() >= 1, "Hessian must be square and non-empty");
  require((v - v.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * v.cwiseAbs().maxCoeff(),
          "Hessian must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(v);
  if (solver.info() != Eigen::Success) fail(ErrorCode::NonConvergence, "eigen-solver failed");
  const Eigen::VectorXd& lambda = solver.eigenvalues();  // ascending
  ModeSpectrum out;
  out.eigenvectors = solver.eigenvectors();
  out.frequencies.resize(static_cast<std::size_t>(lambda.size()));
  for (Eigen::Index a = 0; a < lambda.size(); ++a) {
    if (!(lambda(a) > 0.0)) {
      std::ostringstream msg;
      msg << "non-positive curvature eigenvalue " << lambda(a) << " (chain not crystallized)";
      fail(ErrorCode::NotCrystallized, msg.str());
    }
    out.frequencies[static_cast<std::size_t>(a)] = std::sqrt(lambda(a));
    auto col = out.eigenvectors.col(a);
    Eigen::Index imax = 0;
    // Ties (e.g. the uniform mode) resolve to the first index.
    for (Eigen::Index j = 1; j < col.size(); ++j)
      if (std::abs(col(j)) > std::abs(col(imax)) * (1.0 + 1e-9)) imax = j;
    if (col(imax) < 0.0) col = -col;
  }
  return out;
}

ModeSpectrum chain_modes(const ChainConfig& config) {
  ModeSpectrum s = solve_modes(hessian(solve_equilibrium(config)));
  for (double& nu : s.frequencies) nu *= config.axial_frequency;
  return s;
}

LambDickeSet lamb_dicke(const ModeSpectrum& spectrum, const ChainConfig& config,
                        double cos_theta0) {
  require(std::abs(cos_theta0) <= 1.0, "|cos_theta0| must be <= 1");
  config.validate();
  const auto n = static_cast<Eigen::Index>(spectrum.size());
  LambDickeSet out{Eigen::MatrixXd(n, n)};
  for (Eigen::Index a = 0; a < n; ++a) {
    const double scale =
        cos_theta0 * std::sqrt(config.recoil_frequency / spectrum.frequencies[static_cast<std::size_t>(a)]);
    for (Eigen::Index j = 0; j < n; ++j) out.eta(j, a) = scale * spectrum.eigenvectors(j, a);
  }
  return out;
}

}  // namespace crystalcool
