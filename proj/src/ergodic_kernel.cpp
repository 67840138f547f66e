#include "crystalcool/ergodic_kernel.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "crystalcool/errors.hpp"
#include "crystalcool/quadrature.hpp"

namespace crystalcool {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_prefactor(int n) {
  return std::lgamma(static_cast<double>(n)) - std::lgamma(n - 0.5) -
         0.5 * std::log(std::numbers::pi);
}

// CDF of t in [-1, 1].
double t_cdf(int n, double t) {
  if (t <= -1.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = n - 0.5;
  return boost::math::ibeta(a, a, 0.5 * (t + 1.0));
}

// -(1 - t^2)^(N - 1/2) / (2N - 1), an antiderivative of t (1 - t^2)^(N - 3/2).
double t_moment_antiderivative(int n, double t) {
  const double one_minus = std::max(0.0, 1.0 - t * t);
  return -std::pow(one_minus, n - 0.5) / (2.0 * n - 1.0);
}

}  // namespace

void KernelParams::validate() const {
  require(e >= 0.0 && std::isfinite(e), "kernel energy must be finite and >= 0");
  require(recoil >= 0.0 && std::isfinite(recoil), "kernel recoil must be finite and >= 0");
  require(n_ions >= 1, "kernel needs n_ions >= 1");
}

double KernelParams::half_width() const { return std::sqrt(4.0 * recoil * e); }

double kernel_prefactor(int n_ions) { return std::exp(log_prefactor(n_ions)); }

double kernel_f(const KernelParams& p, double e_prime) {
  p.validate();
  if (p.is_delta()) return e_prime == p.center() ? kInf : 0.0;
  const double s = p.half_width();
  const double x = (e_prime - p.center()) / s;
  const double one_minus = 1.0 - x * x;
  if (one_minus < 0.0) return 0.0;
  const double exponent = p.n_ions - 1.5;
  if (one_minus == 0.0) return exponent < 0.0 ? kInf : (exponent == 0.0 ? kernel_prefactor(p.n_ions) / s : 0.0);
  return std::exp(log_prefactor(p.n_ions) + exponent * std::log(one_minus)) / s;
}

namespace {

// t = (x - centre)/s, pinned to exactly -1 or 1 at and beyond the support ends: the
// N = 1 CDF has a square-root edge, so a rounding error of 1e-16 in t would cost
// 1e-8 of mass.
double support_t(const KernelParams& p, double x) {
  if (x <= p.support_lo()) return -1.0;
  if (x >= p.support_hi()) return 1.0;
  return std::clamp((x - p.center()) / p.half_width(), -1.0, 1.0);
}

}  // namespace

double kernel_mass(const KernelParams& p, double a, double b) {
  p.validate();
  if (b <= a) return 0.0;
  if (p.is_delta()) return (p.center() >= a && p.center() < b) ? 1.0 : 0.0;
  const double ta = support_t(p, a), tb = support_t(p, b);
  return t_cdf(p.n_ions, tb) - t_cdf(p.n_ions, ta);
}

double kernel_first_moment(const KernelParams& p, double a, double b) {
  p.validate();
  if (b <= a) return 0.0;
  if (p.is_delta()) return (p.center() >= a && p.center() < b) ? p.center() : 0.0;
  const double s = p.half_width();
  const double ta = support_t(p, a), tb = support_t(p, b);
  const double mass = t_cdf(p.n_ions, tb) - t_cdf(p.n_ions, ta);
  const double t_part = kernel_prefactor(p.n_ions) *
                        (t_moment_antiderivative(p.n_ions, tb) - t_moment_antiderivative(p.n_ions, ta));
  return p.center() * mass + s * t_part;
}

KernelMoments kernel_moments_quadrature(const KernelParams& p, std::size_t nodes) {
  p.validate();
  KernelMoments m;
  if (p.is_delta()) {
    m.norm = 1.0;
    m.mean_shift = p.recoil;
    m.second_shift = p.recoil * p.recoil;
    return m;
  }
  // f dE' = prefactor cos(u)^(2N-2) du
  const GaussLegendre& gl = gauss_legendre(nodes);
  const double c = kernel_prefactor(p.n_ions);
  const double s = p.half_width();
  const double half_pi = 0.5 * std::numbers::pi;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double u = half_pi * gl.nodes[i];
    const double w = half_pi * gl.weights[i] * c * std::pow(std::cos(u), 2.0 * p.n_ions - 2.0);
    const double shift = p.recoil + s * std::sin(u);
    m.norm += w;
    m.mean_shift += w * shift;
    m.second_shift += w * shift * shift;
  }
  return m;
}

KernelMoments kernel_moments_closed(const KernelParams& p) {
  return {1.0, p.recoil, p.recoil * p.recoil + 2.0 * p.recoil * p.e / p.n_ions};
}

double q_classical(double e, double e_prime, std::span<const double> nu, double recoil) {
  require(!nu.empty(), "spectrum is empty");
  require(recoil > 0.0, "q_classical requires recoil > 0");
  require(e > 0.0 && e_prime > 0.0, "q_classical requires positive energies");
  const double n = static_cast<double>(nu.size());
  const double de = e_prime - e;
  const double bracket = -de * de - recoil * recoil + 2.0 * recoil * (e_prime + e);
  const double exponent = n - 1.5;
  double log_nu = 0.0;
  for (double f : nu) log_nu += std::log(f);
  // Gamma(N)^2: one factor from f, one from (N-1)! in g(E').
  const double log_front = log_nu + 2.0 * std::lgamma(n) - std::lgamma(n - 0.5) -
                           0.5 * std::log(std::numbers::pi) -
                           (n - 1.0) * std::log(4.0 * recoil * e * e_prime);
  if (bracket < 0.0) return 0.0;
  if (bracket == 0.0) return exponent < 0.0 ? kInf : (exponent == 0.0 ? std::exp(log_front) : 0.0);
  return std::exp(log_front + exponent * std::log(bracket));
}

double q_classical(double e, double e_prime, const ModeSpectrum& spectrum, double recoil) {
  return q_classical(e, e_prime, spectrum.frequencies, recoil);
}

double kernel_sample(const KernelParams& p, std::mt19937_64& rng) {
  p.validate();
  require(p.recoil > 0.0, "kernel_sample requires recoil > 0");
  double t;
  if (p.n_ions == 1) {
    std::uniform_real_distribution<double> u(-0.5 * std::numbers::pi, 0.5 * std::numbers::pi);
    t = std::sin(u(rng));
  } else {
    std::gamma_distribution<double> g(p.n_ions - 0.5, 1.0);
    const double x = g(rng);
    const double y = g(rng);
    t = 2.0 * x / (x + y) - 1.0;
  }
  return p.center() + p.half_width() * t;
}

}  // namespace crystalcool
