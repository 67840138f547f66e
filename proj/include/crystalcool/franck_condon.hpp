#pragma once

// Franck-Condon amplitudes of the recoil displacement exp(i eta (a + a^dagger))
// between motional Fock states, plus brute-force shell sums built on them.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "crystalcool/ion_chain.hpp"

namespace crystalcool {

class FockState {
 public:
  FockState(std::vector<int> occupations, std::span<const double> frequencies);

  const std::vector<int>& occupations() const { return occupations_; }
  double energy() const { return energy_; }
  std::size_t modes() const { return occupations_.size(); }

 private:
  std::vector<int> occupations_;
  double energy_;
};

// Magnitude and phase of a single-mode amplitude. The phase is i^quarter_turns
// times the sign; magnitude is carried as a logarithm so huge Laguerre values and
// tiny Gaussian factors never overflow.
struct FcAmplitude {
  double log_magnitude = 0.0;  // -inf for an exact zero
  int sign = 1;
  int quarter_turns = 0;

  double magnitude() const;
  double probability() const;  // |amplitude|^2
  std::complex<double> value() const;
};

// <l| exp(i eta (a + a^dagger)) |n> =
//   exp(-eta^2/2) sqrt(r!/(r+d)!) (i eta)^d L_r^d(eta^2),  r = min(n,l), d = |l-n|.
FcAmplitude fc_single_parts(int n, int l, double eta);
std::complex<double> fc_single(int n, int l, double eta);
double fc_probability(int n, int l, double eta);

// Generalised Laguerre L_r^a(x) as (log|L|, sign) via the three-term recurrence.
struct LogValue {
  double log_abs;
  int sign;
};
LogValue laguerre_log(int r, int a, double x);

// Product over modes of single-mode amplitudes.
std::complex<double> fc_multi(const FockState& n, const FockState& l,
                              std::span<const double> eta_row);

struct MomentResult {
  double m1 = 0.0;  // ion-averaged <E_k - E_n>
  double m2 = 0.0;  // ion-averaged <(E_k - E_n)^2>
  std::vector<double> m1_per_ion;
  std::vector<double> m2_per_ion;
  double completeness = 1.0;  // worst sum_k |FC|^2 over ions
};

// First and second moments of the final-state distribution by explicit summation
// over final Fock states inside a per-mode window grown until the mode's
// completeness reaches 1 - 1e-11 (total >= 1 - 1e-10). Throws
// ErrorCode::TruncationInsufficient when `max_window` is reached first.
MomentResult moments_bruteforce(const FockState& n, const ModeSpectrum& spectrum,
                                const ChainConfig& config, double cos_theta,
                                int max_window = 20000);

// Closed forms of the same moments for ion j (and averaged over ions).
double moment1_closed(const ChainConfig& config, double cos_theta);
double moment2_closed_ion(const FockState& n, const ModeSpectrum& spectrum,
                          const ChainConfig& config, double cos_theta, std::size_t ion);
double moment2_closed_average(const FockState& n, const ChainConfig& config, double cos_theta);

struct ShellCoupling {
  double e_from = 0.0;
  double e_to = 0.0;
  double q = 0.0;
  std::uint64_t d_from = 0;
  std::uint64_t d_to = 0;
};

// Q(E,E') = 1/(N D D') sum_j sum'_n sum'_k |<k|exp(-i k z_j)|n>|^2 over the
// half-open shells of width delta_e. Exact enumeration; states are streamed.
ShellCoupling average_coupling_bruteforce(double e_from, double e_to, double delta_e,
                                          const ModeSpectrum& spectrum,
                                          const ChainConfig& config, double cos_theta,
                                          std::uint64_t budget = 2'000'000'000ULL);

// First-order Lamb-Dicke transition weights for one driven ion.
struct LdWeights {
  double carrier = 1.0;
  std::vector<double> blue;  // n_b -> n_b + 1
  std::vector<double> red;   // n_b -> n_b - 1
  bool outside_regime = false;  // some |eta| > 0.3

  double total() const;
};

LdWeights ld_weights(const FockState& n, std::span<const double> eta_row);
LdWeights ld_weights(const FockState& n, const ModeSpectrum& spectrum,
                     const ChainConfig& config, double cos_theta, std::size_t ion);

}  // namespace crystalcool
