#include "crystalcool/spectrum.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "crystalcool/errors.hpp"

namespace crystalcool {

EnergyGrid::EnergyGrid(double first_center, double delta_e, std::size_t count)
    : delta_e_(delta_e) {
  require(delta_e > 0.0 && std::isfinite(delta_e), "delta_e must be finite and > 0");
  require(count >= 1, "energy grid needs at least one shell");
  require(std::isfinite(first_center), "grid origin must be finite");
  centers_.resize(count);
  for (std::size_t i = 0; i < count; ++i)
    centers_[i] = first_center + static_cast<double>(i) * delta_e;
}

EnergyGrid EnergyGrid::spanning(double first_center, double e_max, double delta_e) {
  require(delta_e > 0.0, "delta_e must be > 0");
  require(e_max >= first_center, "e_max must not be below the first centre");
  const auto count =
      static_cast<std::size_t>(std::floor((e_max - first_center) / delta_e + 1e-9)) + 1;
  return EnergyGrid(first_center, delta_e, count);
}

std::ptrdiff_t EnergyGrid::shell_of(double e) const {
  const double x = (e - lower_edge()) / delta_e_;
  if (!(x >= 0.0)) return -1;
  auto i = static_cast<std::ptrdiff_t>(std::floor(x));
  // Guard the half-open boundaries against round-off in x.
  if (i > 0 && e < centers_[static_cast<std::size_t>(i)] - 0.5 * delta_e_) --i;
  if (i + 1 < static_cast<std::ptrdiff_t>(centers_.size()) &&
      e >= centers_[static_cast<std::size_t>(i + 1)] - 0.5 * delta_e_)
    ++i;
  if (i >= static_cast<std::ptrdiff_t>(centers_.size())) return -1;
  return i;
}

std::uint64_t ShellCensus::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

namespace {

struct Enumerator {
  std::span<const double> nu;
  double e_lo;
  double e_hi;
  const StateVisitor& visit;
  std::uint64_t budget;
  std::uint64_t visited = 0;
  std::vector<int> occ;

  void recurse(std::size_t mode, double energy) {
    if (mode == nu.size()) {
      if (energy >= e_lo) {
        if (++visited > budget) {
          std::ostringstream msg;
          msg << "state enumeration exceeded budget of " << budget << " states";
          fail(ErrorCode::BudgetExceeded, msg.str());
        }
        visit(occ, energy);
      }
      return;
    }
    // Remaining modes contribute at least their zero-point energy.
    double rest = 0.0;
    for (std::size_t a = mode + 1; a < nu.size(); ++a) rest += 0.5 * nu[a];
    for (int n = 0;; ++n) {
      const double e = energy + (n + 0.5) * nu[mode];
      if (e + rest >= e_hi) break;
      occ[mode] = n;
      recurse(mode + 1, e);
    }
  }
};

}  // namespace

void for_each_state(const ModeSpectrum& spectrum, double e_lo, double e_hi,
                    const StateVisitor& visit, std::uint64_t budget) {
  require(std::isfinite(e_hi), "enumeration upper energy must be finite");
  require(spectrum.size() >= 1, "spectrum is empty");
  Enumerator en{spectrum.frequencies, e_lo, e_hi, visit, budget, 0,
                std::vector<int>(spectrum.size(), 0)};
  en.recurse(0, 0.0);
}

ShellCensus count_states(const ModeSpectrum& spectrum, const EnergyGrid& grid,
                         std::uint64_t budget) {
  ShellCensus census{std::vector<std::uint64_t>(grid.size(), 0)};
  const double lo = grid.lower_edge();
  const double hi = grid.upper_edge();
  // Partition by the first-mode occupation; each block is an independent census.
  const double nu0 = spectrum.frequencies.front();
  std::uint64_t spent = 0;
  for (int n0 = 0; (n0 + 0.5) * nu0 < hi; ++n0) {
    ModeSpectrum rest;
    rest.frequencies.assign(spectrum.frequencies.begin() + 1, spectrum.frequencies.end());
    const double offset = (n0 + 0.5) * nu0;
    if (rest.frequencies.empty()) {
      if (offset >= lo) {
        ++census.counts[static_cast<std::size_t>(grid.shell_of(offset))];
        ++spent;
      }
      continue;
    }
    for_each_state(
        rest, lo - offset, hi - offset,
        [&](std::span<const int>, double e) {
          const auto i = grid.shell_of(e + offset);
          if (i >= 0) ++census.counts[static_cast<std::size_t>(i)];
        },
        budget - spent);
    spent = census.total();
    if (spent > budget) fail(ErrorCode::BudgetExceeded, "census exceeded state budget");
  }
  return census;
}

std::uint64_t shell_count(const ModeSpectrum& spectrum, double e, double delta_e,
                          std::uint64_t budget) {
  std::uint64_t count = 0;
  for_each_state(
      spectrum, e - 0.5 * delta_e, e + 0.5 * delta_e,
      [&](std::span<const int>, double) { ++count; }, budget);
  return count;
}

double smooth_density(std::span<const double> nu, double e) {
  require(e >= 0.0, "smooth_density requires E >= 0");
  require(!nu.empty(), "spectrum is empty");
  const double n = static_cast<double>(nu.size());
  double log_prod = 0.0;
  for (double f : nu) log_prod += std::log(f);
  if (nu.size() == 1) return std::exp(-log_prod);
  if (e == 0.0) return 0.0;
  return std::exp((n - 1.0) * std::log(e) - std::lgamma(n) - log_prod);
}

double smooth_density(const ModeSpectrum& spectrum, double e) {
  return smooth_density(spectrum.frequencies, e);
}

std::vector<std::size_t> sparse_shells(const ShellCensus& census, std::uint64_t min_count) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < census.counts.size(); ++i)
    if (census.counts[i] < min_count) out.push_back(i);
  return out;
}

}  // namespace crystalcool
