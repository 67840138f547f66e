#pragma once

// Classical energy-transfer kernel f_E(E') for one photon recoil on an N-mode
// harmonic crystal, and the shell coupling Q(E,E') = f_E(E') / g(E').
//
// With E' = E + recoil + sqrt(4 recoil E) t, the variable t in [-1, 1] has density
// proportional to (1 - t^2)^(N - 3/2), i.e. (t + 1)/2 ~ Beta(N - 1/2, N - 1/2).

#include <random>
#include <span>

#include "crystalcool/ion_chain.hpp"

namespace crystalcool {

struct KernelParams {
  double e = 0.0;       // initial energy
  double recoil = 0.0;  // effective recoil hbar omega_R cos^2(theta)
  int n_ions = 1;

  void validate() const;
  double half_width() const;  // sqrt(4 recoil e)
  double center() const { return e + recoil; }
  double support_lo() const { return center() - half_width(); }
  double support_hi() const { return center() + half_width(); }
  // recoil == 0 or e == 0: all weight sits at center().
  bool is_delta() const { return half_width() == 0.0; }
};

// Gamma(N) / (sqrt(pi) Gamma(N - 1/2)).
double kernel_prefactor(int n_ions);

// Density f_E(E'). Zero outside the support. For a delta kernel the value is +inf
// at E' == center() and 0 elsewhere. For N = 1 the endpoints return +inf.
double kernel_f(const KernelParams& params, double e_prime);

// Integral of f over [a, b] and of E' f over [a, b] (exact, via the incomplete beta).
double kernel_mass(const KernelParams& params, double a, double b);
double kernel_first_moment(const KernelParams& params, double a, double b);

struct KernelMoments {
  double norm = 0.0;
  double mean_shift = 0.0;     // int (E' - E) f
  double second_shift = 0.0;   // int (E' - E)^2 f
};

// Gauss-Legendre quadrature in u with E' = center + half_width sin(u).
KernelMoments kernel_moments_quadrature(const KernelParams& params, std::size_t nodes = 200);
KernelMoments kernel_moments_closed(const KernelParams& params);

// Q(E,E') in closed form, exactly symmetric in its energy arguments and
// satisfying g(E') Q(E,E') = f_E(E'). Zero outside the mutual support.
double q_classical(double e, double e_prime, std::span<const double> frequencies, double recoil);
double q_classical(double e, double e_prime, const ModeSpectrum& spectrum, double recoil);

// Draws E' with density f_E. Requires recoil > 0.
double kernel_sample(const KernelParams& params, std::mt19937_64& rng);

}  // namespace crystalcool
