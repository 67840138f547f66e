#include <doctest.h>

#include <cmath>
#include <vector>

#include "crystalcool/errors.hpp"
#include "crystalcool/spectrum.hpp"

using namespace crystalcool;

namespace {

// Independent oracle: plain nested loops over up to three modes.
std::vector<std::uint64_t> loop_census(const std::vector<double>& nu, const EnergyGrid& grid) {
  std::vector<std::uint64_t> counts(grid.size(), 0);
  const double top = grid.upper_edge();
  const std::size_t m = nu.size();
  const int n0 = static_cast<int>(top / nu[0]) + 1;
  const int n1 = m > 1 ? static_cast<int>(top / nu[1]) + 1 : 0;
  const int n2 = m > 2 ? static_cast<int>(top / nu[2]) + 1 : 0;
  for (int a = 0; a <= n0; ++a)
    for (int b = 0; b <= n1; ++b)
      for (int c = 0; c <= n2; ++c) {
        double e = (a + 0.5) * nu[0];
        if (m > 1) e += (b + 0.5) * nu[1];
        if (m > 2) e += (c + 0.5) * nu[2];
        const auto i = grid.shell_of(e);
        if (i >= 0) ++counts[static_cast<std::size_t>(i)];
      }
  return counts;
}

}  // namespace

TEST_CASE("grid geometry and half-open shells") {
  const EnergyGrid g(0.25, 0.5, 5);
  CHECK(g.lower_edge() == 0.0);
  CHECK(g.upper_edge() == 2.5);
  CHECK(g.shell_of(0.0) == 0);
  CHECK(g.shell_of(0.5) == 1);
  CHECK(g.shell_of(std::nextafter(0.5, 0.0)) == 0);
  CHECK(g.shell_of(2.5) == -1);
  CHECK(g.shell_of(-1e-9) == -1);
  CHECK(EnergyGrid::spanning(0.1, 30.0, 0.2).size() == 150);
}

TEST_CASE("census matches nested-loop enumeration") {
  for (int n : {1, 2, 3}) {
    const ModeSpectrum s = chain_modes(ChainConfig{n, 1.0, 0.0});
    const EnergyGrid grid = EnergyGrid::spanning(0.1, 25.0, 0.2);
    const ShellCensus census = count_states(s, grid);
    CHECK(census.counts == loop_census(s.frequencies, grid));
  }
}

TEST_CASE("commensurate frequencies are counted with their degeneracy") {
  ModeSpectrum s;
  s.frequencies = {1.0, 1.0};
  s.eigenvectors = Eigen::MatrixXd::Identity(2, 2);
  // E = n1 + n2 + 1 is (k+1)-fold degenerate.
  for (int k = 0; k < 10; ++k) CHECK(shell_count(s, k + 1.0, 0.5) == static_cast<std::uint64_t>(k + 1));
}

TEST_CASE("shifting the grid by half a shell keeps the total count") {
  const ModeSpectrum s = chain_modes(ChainConfig{3, 1.0, 0.0});
  const EnergyGrid a(0.1, 0.2, 150);
  const EnergyGrid b(0.2, 0.2, 150);  // [0.1, 30.1)
  // States in [0, 30) and [0.1, 30.1) differ only by those in [0, 0.1) and [30, 30.1).
  std::uint64_t edge = 0;
  for_each_state(s, 30.0, 30.1, [&](std::span<const int>, double) { ++edge; });
  CHECK(count_states(s, a).total() + edge == count_states(s, b).total());
}

TEST_CASE("visitor energies are consistent with occupations") {
  const ModeSpectrum s = chain_modes(ChainConfig{3, 1.0, 0.0});
  std::uint64_t visited = 0;
  for_each_state(s, 10.0, 12.0, [&](std::span<const int> n, double e) {
    double direct = 0.0;
    for (std::size_t a = 0; a < n.size(); ++a) direct += (n[a] + 0.5) * s.frequencies[a];
    CHECK(e == doctest::Approx(direct).epsilon(1e-12));
    CHECK(e >= 10.0);
    CHECK(e < 12.0);
    ++visited;
  });
  CHECK(visited == shell_count(s, 11.0, 2.0));
}

TEST_CASE("smooth density formula") {
  const ModeSpectrum s = chain_modes(ChainConfig{3, 1.0, 0.0});
  const double prod = s.frequencies[0] * s.frequencies[1] * s.frequencies[2];
  CHECK(smooth_density(s, 10.0) == doctest::Approx(100.0 / (2.0 * prod)).epsilon(1e-12));
  const std::vector<double> one{1.0};
  CHECK(smooth_density(one, 7.0) == doctest::Approx(1.0));
}

TEST_CASE("census approaches the smooth density at high energy") {
  const ModeSpectrum s = chain_modes(ChainConfig{2, 1.0, 0.0});
  const EnergyGrid grid = EnergyGrid::spanning(1.0, 400.0, 2.0);
  const ShellCensus c = count_states(s, grid);
  auto dev = [&](double lo, double hi) {
    double sum = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double e = grid.centers()[i];
      if (e < lo || e >= hi || c.counts[i] == 0) continue;
      sum += std::abs(c.counts[i] - smooth_density(s, e) * 2.0) / c.counts[i];
      ++n;
    }
    return sum / n;
  };
  CHECK(dev(300.0, 400.0) < dev(20.0, 100.0));
}

TEST_CASE("budget and sparse-shell diagnostics") {
  const ModeSpectrum s = chain_modes(ChainConfig{3, 1.0, 0.0});
  try {
    count_states(s, EnergyGrid::spanning(0.1, 30.0, 0.2), 100);
    FAIL("expected BudgetExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BudgetExceeded);
  }
  const ShellCensus c = count_states(s, EnergyGrid::spanning(0.1, 30.0, 0.2));
  const auto sparse = sparse_shells(c);
  CHECK(!sparse.empty());
  CHECK(sparse.front() == 0);
}
