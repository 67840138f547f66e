#include "crystalcool/verify.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <random>
#include <sstream>

#include "crystalcool/cooling_dynamics.hpp"
#include "crystalcool/ergodic_kernel.hpp"
#include "crystalcool/ergodic_rate.hpp"
#include "crystalcool/errors.hpp"
#include "crystalcool/franck_condon.hpp"
#include "crystalcool/ion_chain.hpp"
#include "crystalcool/lamb_dicke_dynamics.hpp"
#include "crystalcool/spectrum.hpp"

namespace crystalcool {

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Regime shared by the ergodic checks: omega_R/gamma = 0.005, gamma = 50 >= 10 nu_3.
CoolingParams ergodic_regime(int m_driven) {
  CoolingParams p;
  p.n_ions = 3;
  p.gamma = 50.0;
  p.detuning = -25.0;
  p.rabi = 1.0;
  p.recoil = 0.25;
  p.m_driven = m_driven;
  return p;
}

struct ErgodicFit {
  double l1 = 0.0;
  double steady_mean = 0.0;
  double fitted_rate = 0.0;
  double max_norm_error = 0.0;
  double leak = 0.0;
};

ErgodicFit ergodic_fit(const CoolingParams& p) {
  const double e_inf = steady_energy(p);
  const EnergyGrid grid = EnergyGrid::spanning(0.5, 50.0 * e_inf / p.n_ions, 1.0);
  const ErgodicRateEquation eq(grid, p);
  const EnergyDistribution steady = eq.steady_state();
  ErgodicFit out;
  out.l1 = steady.l1_distance(fp_steady(p, grid));
  out.steady_mean = steady.mean_energy();
  // Relax from a thermal state at twice the steady energy.
  const EnergyDistribution p0 = thermal_distribution(p.n_ions, 2.0 * e_inf / p.n_ions, grid);
  const double t_final = std::log(40.0) / cooling_rate(p);
  const ErgodicRun run = eq.evolve(p0, t_final, eq.max_stable_dt(), 5);
  out.fitted_rate = fit_relaxation_rate(run.trajectory, out.steady_mean);
  out.max_norm_error = run.max_norm_error;
  out.leak = run.max_leak_fraction;
  return out;
}

}  // namespace

CheckResult check_mode_frequencies(const VerifyOptions&) {
  const ModeSpectrum s = chain_modes(ChainConfig{3, 1.0, 0.0});
  const double expected[] = {1.0, 1.7321, 2.4083};
  double worst = 0.0;
  for (std::size_t a = 0; a < 3; ++a) worst = std::max(worst, rel(s.frequencies[a], expected[a]));
  std::ostringstream d;
  d.precision(6);
  d << "nu = " << s.frequencies[0] << ", " << s.frequencies[1] << ", " << s.frequencies[2]
    << "; worst relative deviation " << worst << " (tol 1e-3)";
  return {1, "mode-frequencies", worst < 1e-3, d.str()};
}

CheckResult check_state_census(const VerifyOptions&) {
  // Frozen bound: the exact enumeration gives 0.0650 on [20, 30].
  constexpr double kTopThirdBound = 0.08;
  const ModeSpectrum s = chain_modes(ChainConfig{3, 1.0, 0.0});
  const EnergyGrid grid = EnergyGrid::spanning(0.1, 30.0, 0.2);
  const ShellCensus census = count_states(s, grid);
  double top = 0.0, middle = 0.0;
  int n_top = 0, n_middle = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double e = grid.centers()[i];
    const double d = static_cast<double>(census.counts[i]);
    if (d == 0.0) continue;
    const double dev = std::abs(d - smooth_density(s, e) * grid.delta_e()) / d;
    if (e >= 20.0) {
      top += dev;
      ++n_top;
    } else if (e >= 10.0) {
      middle += dev;
      ++n_middle;
    }
  }
  top /= n_top;
  middle /= n_middle;
  const std::uint64_t total = census.total();
  std::ostringstream d;
  d.precision(6);
  d << "mean |D - g dE|/D on [20,30] = " << top << " (bound " << kTopThirdBound
    << "), on [10,20) = " << middle << "; states counted " << total;
  const bool ok = top < kTopThirdBound && top < middle;
  return {2, "state-census", ok, d.str()};
}

CheckResult check_fc_moments(const VerifyOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<int> occupation(0, 50);
  std::uniform_real_distribution<double> cosine(0.2, 1.0);
  int states = 0;
  double worst1 = 0.0, worst2 = 0.0, worst_completeness = 1.0;
  for (int n_ions = 1; n_ions <= 3; ++n_ions) {
    const ChainConfig config{n_ions, 1.0, 0.1};
    const ModeSpectrum s = chain_modes(config);
    for (int k = 0; k < 40; ++k) {
      std::vector<int> occ(static_cast<std::size_t>(n_ions));
      for (int& o : occ) o = occupation(rng);
      const FockState n(occ, s.frequencies);
      const double c = cosine(rng);
      const MomentResult m = moments_bruteforce(n, s, config, c);
      const double m1 = config.recoil_frequency * c * c;
      const double m2 = 2.0 * m1 * n.energy() / n_ions + m1 * m1;
      worst1 = std::max(worst1, rel(m.m1, m1));
      for (double x : m.m1_per_ion) worst1 = std::max(worst1, rel(x, m1));
      worst2 = std::max(worst2, rel(m.m2, m2));
      worst_completeness = std::min(worst_completeness, m.completeness);
      ++states;
    }
  }
  const bool ok = worst1 < 1e-6 && worst2 < 1e-6 && worst_completeness > 1.0 - 1e-10;
  std::ostringstream d;
  d.precision(4);
  d << states << " states, worst relative error m1 " << worst1 << ", m2 " << worst2
    << " (tol 1e-6), worst completeness 1 - " << 1.0 - worst_completeness;
  return {3, "fc-moments", ok, d.str()};
}

CheckResult check_kernel_contracts(const VerifyOptions&) {
  double worst_norm = 0.0, worst_m1 = 0.0, worst_m2 = 0.0;
  for (int n_ions : {1, 2, 3, 10, 100})
    for (double e : {0.5, 5.0, 40.0, 300.0})
      for (double r : {0.01, 0.3, 2.0}) {
        const KernelParams p{e, r, n_ions};
        const KernelMoments q = kernel_moments_quadrature(p);
        worst_norm = std::max(worst_norm, std::abs(q.norm - 1.0));
        worst_m1 = std::max(worst_m1, rel(q.mean_shift, r));
        worst_m2 = std::max(worst_m2, rel(q.second_shift, r * r + 2.0 * r * e / n_ions));
      }
  const bool ok = worst_norm < 1e-8 && worst_m1 < 1e-6 && worst_m2 < 1e-6;
  std::ostringstream d;
  d.precision(4);
  d << "N in {1,2,3,10,100}: |norm - 1| " << worst_norm << " (tol 1e-8), mean shift "
    << worst_m1 << ", second shift " << worst_m2 << " (tol 1e-6)";
  return {4, "kernel-contracts", ok, d.str()};
}

CheckResult check_quantum_classical(const VerifyOptions&) {
  // Frozen from the enumeration: worst max deviation 0.024, worst weighted 0.0094.
  constexpr double kMaxBound = 0.04;
  constexpr double kWeightedBound = 0.02;
  struct Case {
    int n_ions;
    double e, de, recoil;
  };
  const Case cases[] = {{2, 35.0, 3.5, 2.0}, {2, 50.0, 3.5, 4.0}, {3, 50.0, 5.0, 3.0}, {3, 60.0, 5.0, 5.0}};
  double worst_max = 0.0, worst_weighted = 0.0;
  int pairs = 0;
  for (const Case& c : cases) {
    const ChainConfig config{c.n_ions, 1.0, c.recoil};
    const ModeSpectrum s = chain_modes(config);
    const double nu_top = s.frequencies.back();
    require(c.e >= 20.0 * nu_top && c.de >= 2.0 * nu_top, "case outside the semiclassical regime");
    const KernelParams kp{c.e, c.recoil, c.n_ions};
    const double k_lo = std::ceil((kp.center() - 0.8 * kp.half_width() - c.e) / c.de);
    const double k_hi = std::floor((kp.center() + 0.8 * kp.half_width() - c.e) / c.de);
    double num = 0.0, den = 0.0;
    for (double k = k_lo; k <= k_hi; k += 1.0) {
      const double e_to = c.e + k * c.de;
      if (e_to < 20.0 * nu_top) continue;
      const ShellCoupling sc = average_coupling_bruteforce(c.e, e_to, c.de, s, config, 1.0);
      const double qc = q_classical(c.e, e_to, s, c.recoil);
      worst_max = std::max(worst_max, rel(sc.q, qc));
      num += std::abs(sc.q - qc) * static_cast<double>(sc.d_to);
      den += qc * static_cast<double>(sc.d_to);
      ++pairs;
    }
    worst_weighted = std::max(worst_weighted, num / den);
  }
  const bool ok = worst_max < kMaxBound && worst_weighted < kWeightedBound;
  std::ostringstream d;
  d.precision(4);
  d << pairs << " shell pairs (N = 2, 3): worst |Q_bf - Q_cl|/Q_cl " << worst_max << " (bound "
    << kMaxBound << "), worst D'-weighted " << worst_weighted << " (bound " << kWeightedBound << ")";
  return {5, "quantum-classical-kernel", ok, d.str()};
}

CheckResult check_fokker_planck(const VerifyOptions&) {
  const CoolingParams p = ergodic_regime(1);
  const ErgodicFit fit = ergodic_fit(p);
  const double gamma_cool = cooling_rate(p);
  const double rate_dev = rel(fit.fitted_rate, gamma_cool);
  const bool ok = fit.l1 < 0.05 && rate_dev < 0.05 && fit.max_norm_error < 1e-9;
  std::ostringstream d;
  d.precision(4);
  d << "N=3 gamma=50 omega_R=0.25: L1(steady, P0) " << fit.l1 << " (tol 0.05), <E> "
    << fit.steady_mean << " vs N/|C| " << steady_energy(p) << "; fitted rate / Gamma_cool "
    << fit.fitted_rate / gamma_cool << " (tol 5%); max |norm - 1| " << fit.max_norm_error
    << ", leak " << fit.leak;
  return {6, "fokker-planck-oracle", ok, d.str()};
}

CheckResult check_doppler_limit(const VerifyOptions&) {
  // Argmin over delta in [-3 gamma, -0.05 gamma] for a spread of N, M, alpha, cos.
  double worst_argmin = 0.0;
  const EmissionPattern patterns[] = {EmissionPattern::isotropic(), EmissionPattern::dipole_linear(),
                                      EmissionPattern::dipole_circular()};
  for (int n_ions : {1, 3, 10})
    for (const auto& pattern : patterns)
      for (double c : {1.0, 0.6}) {
        CoolingParams p;
        p.gamma = 20.0;
        p.n_ions = n_ions;
        p.m_driven = n_ions;
        p.pattern = pattern;
        p.cos_theta0 = c;
        const double step = p.gamma / 1000.0;
        double best = 0.0, best_e = std::numeric_limits<double>::infinity();
        for (double delta = -3.0 * p.gamma; delta <= -0.05 * p.gamma + 1e-12; delta += step) {
          p.detuning = delta;
          const double e = steady_energy(p);
          if (e < best_e) {
            best_e = e;
            best = delta;
          }
        }
        worst_argmin = std::max(worst_argmin, std::abs(best + p.gamma / 2.0) / step);
      }

  // Value at the optimum and linear scaling in N.
  CoolingParams p;
  p.gamma = 20.0;
  p.detuning = -10.0;
  double worst_value = 0.0, worst_linear = 0.0;
  double per_ion = 0.0;
  for (int n_ions : {1, 2, 3, 5, 10}) {
    p.n_ions = n_ions;
    p.m_driven = 1;
    const double e = steady_energy(p);
    if (n_ions == 1) per_ion = e;
    worst_linear = std::max(worst_linear, rel(e / n_ions, per_ion));
    worst_value = std::max(worst_value, rel(e, 2.0 / 3.0 * n_ions * p.gamma));
  }
  const bool ok = worst_argmin <= 0.5 && worst_linear < 1e-12 && worst_value < 1e-9;
  std::ostringstream d;
  d.precision(6);
  d << "argmin off -gamma/2 by " << worst_argmin << " grid steps; E/N spread " << worst_linear
    << "; E(N=1, delta=-gamma/2) = " << per_ion / p.gamma << " gamma vs required 2/3 gamma"
    << " (relative deviation " << worst_value << ")";
  return {7, "doppler-limit", ok, d.str()};
}

CheckResult check_lamb_dicke(const VerifyOptions&) {
  CoolingParams p;
  p.n_ions = 3;
  p.m_driven = 3;
  p.gamma = 50.0;
  p.detuning = -25.0;
  p.rabi = 1.0;
  p.recoil = 0.05;
  const ModeSpectrum s = chain_modes(ChainConfig{3, 1.0, p.recoil});
  const auto coeffs = ld_coefficients(s, p);
  const std::vector<double> steady = ld_steady_occupations(coeffs);
  std::vector<double> start;
  double slowest = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < coeffs.size(); ++b) {
    start.push_back(2.0 * steady[b]);
    slowest = std::min(slowest, coeffs[b].relaxation_rate());
  }
  const LdRun run = ld_evolve(s, p, ld_thermal_state(start), 40.0 / slowest);
  double worst = 0.0;
  for (std::size_t b = 0; b < steady.size(); ++b)
    worst = std::max(worst, rel(run.state.mean_occupations[b], steady[b]));
  const double e_ld = run.state.energy(s);
  const double e_fp = steady_energy(p);
  const double energy_dev = rel(e_ld, e_fp);
  const bool ok = worst < 1e-6 && energy_dev < 0.05 && p.gamma / s.frequencies.back() >= 20.0;
  std::ostringstream d;
  d.precision(6);
  d << "gamma/nu_3 = " << p.gamma / s.frequencies.back() << ": worst |<n>_evolved - <n>_balance|/<n> "
    << worst << " (tol 1e-6); total energy " << e_ld << " vs N/|C| " << e_fp << " (deviation "
    << energy_dev << ", tol 5%)";
  return {8, "lamb-dicke", ok, d.str()};
}

CheckResult check_m_scaling(const VerifyOptions&) {
  CoolingParams p = ergodic_regime(1);
  double worst_formula = 0.0;
  const double base = cooling_rate(p);
  for (int m = 1; m <= p.n_ions; ++m) {
    p.m_driven = m;
    worst_formula = std::max(worst_formula, rel(cooling_rate(p), m * base));
  }
  const ErgodicFit one = ergodic_fit(ergodic_regime(1));
  const ErgodicFit all = ergodic_fit(ergodic_regime(3));
  const double ratio = all.fitted_rate / one.fitted_rate;
  const double ratio_dev = rel(ratio, 3.0);
  const double dev_all = rel(all.fitted_rate, cooling_rate(ergodic_regime(3)));
  const bool ok = worst_formula < 1e-12 && ratio_dev < 0.05 && dev_all < 0.05;
  std::ostringstream d;
  d.precision(6);
  d << "formula Gamma(M)/(M Gamma(1)) spread " << worst_formula << "; fitted Gamma(M=3)/Gamma(M=1) = "
    << ratio << " (tol 5%); fitted/formula at M=3 " << all.fitted_rate / cooling_rate(ergodic_regime(3));
  return {9, "m-scaling", ok, d.str()};
}

const std::vector<NamedCheck>& acceptance_checks() {
  static const std::vector<NamedCheck> checks{
      {1, "mode-frequencies", check_mode_frequencies},
      {2, "state-census", check_state_census},
      {3, "fc-moments", check_fc_moments},
      {4, "kernel-contracts", check_kernel_contracts},
      {5, "quantum-classical-kernel", check_quantum_classical},
      {6, "fokker-planck-oracle", check_fokker_planck},
      {7, "doppler-limit", check_doppler_limit},
      {8, "lamb-dicke", check_lamb_dicke},
      {9, "m-scaling", check_m_scaling},
  };
  return checks;
}

CheckResult run_check(const NamedCheck& check, const VerifyOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult r;
  try {
    r = check.run(options);
  } catch (const Error& e) {
    r = {check.id, check.name, false,
         "error code=" + std::string(error_code_name(e.code())) + " message=" + e.what()};
  } catch (const std::exception& e) {
    r = {check.id, check.name, false, std::string("exception: ") + e.what()};
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string format_result(const CheckResult& r) {
  std::ostringstream out;
  out.precision(3);
  out << (r.passed ? "PASS " : "FAIL ") << r.id << " " << r.name << " (" << std::fixed << r.seconds
      << " s): " << r.detail;
  return out.str();
}

}  // namespace crystalcool
