#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "crystalcool/ion_chain.hpp"

namespace crystalcool {

// Equally spaced shell centres; shell i is the half-open interval
// [centers[i] - delta_e/2, centers[i] + delta_e/2).
class EnergyGrid {
 public:
  EnergyGrid(double first_center, double delta_e, std::size_t count);

  // Centres first_center + i*delta_e for every centre <= e_max.
  static EnergyGrid spanning(double first_center, double e_max, double delta_e);

  double delta_e() const { return delta_e_; }
  const std::vector<double>& centers() const { return centers_; }
  std::size_t size() const { return centers_.size(); }
  double lower_edge() const { return centers_.front() - 0.5 * delta_e_; }
  double upper_edge() const { return centers_.back() + 0.5 * delta_e_; }
  // Index of the shell containing e, or -1 when outside.
  std::ptrdiff_t shell_of(double e) const;

 private:
  double delta_e_;
  std::vector<double> centers_;
};

struct ShellCensus {
  std::vector<std::uint64_t> counts;  // aligned with grid centres
  std::uint64_t total() const;
};

// Visitor receives the occupation tuple and its energy sum_a (n_a + 1/2) nu_a.
using StateVisitor = std::function<void(std::span<const int>, double)>;

// Streams every Fock state with energy in [e_lo, e_hi). Depth-first over modes with
// the pruning bound n_a <= (e_hi - partial)/nu_a; memory O(N).
// Throws ErrorCode::BudgetExceeded when more than `budget` states are visited.
void for_each_state(const ModeSpectrum& spectrum, double e_lo, double e_hi,
                    const StateVisitor& visit, std::uint64_t budget = 4'000'000'000ULL);

// Exact per-shell state counts. The enumeration is split over the occupation of
// the first mode; partial counts merge by addition.
ShellCensus count_states(const ModeSpectrum& spectrum, const EnergyGrid& grid,
                         std::uint64_t budget = 4'000'000'000ULL);

// Number of states in a single shell [e - de/2, e + de/2).
std::uint64_t shell_count(const ModeSpectrum& spectrum, double e, double delta_e,
                          std::uint64_t budget = 4'000'000'000ULL);

// g(E) = E^(N-1) / ((N-1)! prod nu_a), evaluated through log-gamma.
double smooth_density(const ModeSpectrum& spectrum, double e);
double smooth_density(std::span<const double> frequencies, double e);

// Shells whose census falls below `min_count` (default threshold for D(E) >> 1).
std::vector<std::size_t> sparse_shells(const ShellCensus& census, std::uint64_t min_count = 10);

}  // namespace crystalcool
