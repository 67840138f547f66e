#include "crystalcool/cooling_dynamics.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crystalcool/errors.hpp"
#include "crystalcool/quadrature.hpp"

namespace crystalcool {

EmissionPattern EmissionPattern::custom(std::vector<double> c, std::vector<double> density) {
  require(c.size() == density.size() && c.size() >= 2, "custom pattern needs >= 2 (c, N) pairs");
  require(std::is_sorted(c.begin(), c.end()), "custom pattern c values must ascend");
  require(std::abs(c.front() + 1.0) < 1e-12 && std::abs(c.back() - 1.0) < 1e-12,
          "custom pattern must span c in [-1, 1]");
  for (double n : density) require(n >= 0.0, "custom pattern density must be >= 0");
  EmissionPattern p(Kind::Custom);
  p.table_c_ = std::move(c);
  p.table_n_ = std::move(density);
  return p;
}

EmissionPattern EmissionPattern::from_name(const std::string& name) {
  if (name == "isotropic") return isotropic();
  if (name == "dipole_linear") return dipole_linear();
  if (name == "dipole_circular") return dipole_circular();
  fail(ErrorCode::InvalidArgument, "unknown emission pattern '" + name + "'");
}

std::string EmissionPattern::name() const {
  switch (kind_) {
    case Kind::Isotropic: return "isotropic";
    case Kind::DipoleLinear: return "dipole_linear";
    case Kind::DipoleCircular: return "dipole_circular";
    case Kind::Custom: return "custom";
  }
  return "custom";
}

double EmissionPattern::density(double c) const {
  switch (kind_) {
    case Kind::Isotropic: return 0.5;
    case Kind::DipoleLinear: return 0.75 * (1.0 - c * c);
    case Kind::DipoleCircular: return 0.375 * (1.0 + c * c);
    case Kind::Custom: break;
  }
  if (c <= table_c_.front()) return table_n_.front();
  if (c >= table_c_.back()) return table_n_.back();
  const auto it = std::upper_bound(table_c_.begin(), table_c_.end(), c);
  const std::size_t i = static_cast<std::size_t>(it - table_c_.begin());
  const double x0 = table_c_[i - 1], x1 = table_c_[i];
  const double w = (c - x0) / (x1 - x0);
  return (1.0 - w) * table_n_[i - 1] + w * table_n_[i];
}

namespace {

// Integrates N(c) * c^power over [-1, 1]; exact for the presets and for each
// linear segment of a custom table.
double pattern_integral(const EmissionPattern& pattern, int power) {
  const GaussLegendre& gl = gauss_legendre(8);
  auto f = [&](double c) { return std::pow(c, power) * pattern.density(c); };
  if (pattern.kind() != EmissionPattern::Kind::Custom) return gl.integrate(f, -1.0, 1.0);
  const auto& c = pattern.table_c();
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) s += gl.integrate(f, c[i], c[i + 1]);
  return s;
}

}  // namespace

double pattern_norm(const EmissionPattern& pattern) { return pattern_integral(pattern, 0); }

double alpha_from_pattern(const EmissionPattern& pattern) {
  const double norm = pattern_norm(pattern);
  if (std::abs(norm - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << "emission pattern integrates to " << norm << ", expected 1";
    fail(ErrorCode::InvalidArgument, msg.str());
  }
  return pattern_integral(pattern, 2);
}

std::vector<std::string> CoolingParams::validate() const {
  require(gamma > 0.0 && std::isfinite(gamma), "gamma must be > 0");
  require(std::isfinite(detuning), "detuning must be finite");
  require(rabi >= 0.0 && std::isfinite(rabi), "rabi must be >= 0");
  require(recoil >= 0.0 && std::isfinite(recoil), "recoil must be >= 0");
  require(std::abs(cos_theta0) <= 1.0, "|cos_theta0| must be <= 1");
  require(n_ions >= 1, "n_ions must be >= 1");
  require(m_driven >= 1 && m_driven <= n_ions, "m_driven must lie in [1, n_ions]");
  const double a = alpha();
  require(a >= 0.0 && a <= 1.0, "alpha must lie in [0, 1]");
  std::vector<std::string> warnings;
  if (rabi / gamma > 0.3) {
    std::ostringstream msg;
    msg << "rabi/gamma = " << rabi / gamma << " exceeds 0.3 (low-saturation premise)";
    warnings.push_back(msg.str());
  }
  return warnings;
}

double lorentzian(double x, const CoolingParams& p) {
  const double y = x - p.detuning;
  return p.m_driven * p.rabi * p.rabi * p.gamma / (4.0 * y * y + p.gamma * p.gamma);
}

double lorentzian_slope0(const CoolingParams& p) {
  const double d = 4.0 * p.detuning * p.detuning + p.gamma * p.gamma;
  return 8.0 * p.m_driven * p.rabi * p.rabi * p.gamma * p.detuning / (d * d);
}

FpCoefficients fp_coefficients(const CoolingParams& p) {
  p.validate();
  const double cos2 = p.cos_theta0 * p.cos_theta0;
  if (cos2 == 0.0) fail(ErrorCode::NoAxialProjection, "no axial cooling component (cos_theta0 = 0)");
  const double a = p.alpha();
  FpCoefficients fp;
  fp.n_ions = p.n_ions;
  const double l0 = lorentzian(0.0, p);
  require(l0 > 0.0, "Fokker-Planck coefficients need a non-zero Rabi frequency");
  fp.c = 2.0 * cos2 / (cos2 + a) * lorentzian_slope0(p) / l0;
  fp.tau_scale = p.recoil * (cos2 + a) * l0;
  return fp;
}

double EnergyDistribution::norm() const {
  double s = 0.0;
  for (double x : p) s += x;
  return s * grid.delta_e();
}

double EnergyDistribution::mean_energy() const {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * grid.centers()[i];
  return s * grid.delta_e();
}

double EnergyDistribution::l1_distance(const EnergyDistribution& other) const {
  if (other.p.size() != p.size() || other.grid.delta_e() != grid.delta_e())
    fail(ErrorCode::DimensionMismatch, "distributions live on different grids");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - other.p[i]);
  return s * grid.delta_e();
}

EnergyDistribution thermal_distribution(int n_ions, double scale, const EnergyGrid& grid) {
  require(n_ions >= 1, "n_ions must be >= 1");
  require(scale > 0.0, "thermal scale must be > 0");
  EnergyDistribution d{grid, std::vector<double>(grid.size())};
  const double de = grid.delta_e();
  double total = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double lo = std::max(0.0, grid.centers()[i] - 0.5 * de);
    const double hi = std::max(0.0, grid.centers()[i] + 0.5 * de);
    const double mass = boost::math::gamma_p(static_cast<double>(n_ions), hi / scale) -
                        boost::math::gamma_p(static_cast<double>(n_ions), lo / scale);
    d.p[i] = mass / de;
    total += mass;
  }
  require(total > 0.0, "thermal distribution has no weight on the grid");
  for (double& x : d.p) x /= total;
  return d;
}

double fp_steady_density(const CoolingParams& params, double e) {
  const FpCoefficients fp = fp_coefficients(params);
  if (!(fp.c < 0.0))
    fail(ErrorCode::NoSteadyState, "no stationary distribution (blue detuning or no axial projection)");
  if (e < 0.0) return 0.0;
  const double n = params.n_ions;
  if (e == 0.0) return params.n_ions == 1 ? -fp.c : 0.0;
  return std::exp(n * std::log(-fp.c) + (n - 1.0) * std::log(e) + fp.c * e - std::lgamma(n));
}

EnergyDistribution fp_steady(const CoolingParams& params, const EnergyGrid& grid) {
  const FpCoefficients fp = fp_coefficients(params);
  if (!(fp.c < 0.0))
    fail(ErrorCode::NoSteadyState, "no stationary distribution (blue detuning or no axial projection)");
  return thermal_distribution(params.n_ions, -1.0 / fp.c, grid);
}

double steady_energy(const CoolingParams& p) {
  p.validate();
  const double cos2 = p.cos_theta0 * p.cos_theta0;
  if (cos2 == 0.0) fail(ErrorCode::NoAxialProjection, "no axial cooling component (cos_theta0 = 0)");
  if (!(p.detuning < 0.0))
    fail(ErrorCode::NoSteadyState, "no stationary distribution (blue detuning or no axial projection)");
  const double d = std::abs(p.detuning);
  return p.n_ions * p.gamma * (p.alpha() + cos2) / (8.0 * cos2) *
         (p.gamma / (2.0 * d) + 2.0 * d / p.gamma);
}

FpEvolution fp_evolution(const CoolingParams& p, double u0, double t) {
  require(u0 > 0.0, "initial thermal scale U0 must be > 0");
  const FpCoefficients fp = fp_coefficients(p);
  require(fp.c != 0.0, "drift constant vanishes (zero detuning)");
  const double cos2 = p.cos_theta0 * p.cos_theta0;
  const double exponent = 2.0 * p.recoil * cos2 * lorentzian_slope0(p) * t / p.n_ions;
  FpEvolution out;
  out.n_ions = p.n_ions;
  out.u = (u0 + 1.0 / fp.c) * std::exp(exponent) - 1.0 / fp.c;
  if (!(out.u > 0.0)) {
    std::ostringstream msg;
    msg << "thermal scale U(t) = " << out.u << " is not positive";
    fail(ErrorCode::NoSteadyState, msg.str());
  }
  return out;
}

EnergyDistribution fp_evolution_distribution(const CoolingParams& params, double u0, double t,
                                             const EnergyGrid& grid) {
  return thermal_distribution(params.n_ions, fp_evolution(params, u0, t).u, grid);
}

double cooling_rate(const CoolingParams& p) {
  p.validate();
  const double d = 4.0 * p.detuning * p.detuning + p.gamma * p.gamma;
  return static_cast<double>(p.m_driven) / p.n_ions * 16.0 * p.recoil * p.cos_theta0 *
         p.cos_theta0 * p.rabi * p.rabi * p.gamma * std::abs(p.detuning) / (d * d);
}

double fit_relaxation_rate(const std::vector<std::pair<double, double>>& trajectory,
                           double e_inf, double lo, double hi) {
  require(!trajectory.empty(), "empty trajectory");
  const double excess0 = trajectory.front().second - e_inf;
  require(excess0 != 0.0, "trajectory starts at the asymptote");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (const auto& [t, e] : trajectory) {
    const double ratio = (e - e_inf) / excess0;
    if (ratio < lo || ratio > hi) continue;
    const double y = std::log(ratio);
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
    ++count;
  }
  if (count < 3) fail(ErrorCode::InvalidArgument, "too few trajectory points inside the fit window");
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return -slope;
}

}  // namespace crystalcool
