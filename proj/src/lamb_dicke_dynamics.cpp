#include "crystalcool/lamb_dicke_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "crystalcool/errors.hpp"

namespace crystalcool {

std::vector<LdCoefficients> ld_coefficients(const ModeSpectrum& spectrum,
                                            const CoolingParams& params) {
  const double cos2 = params.cos_theta0 * params.cos_theta0;
  const double alpha = params.alpha();
  const double l0 = lorentzian(0.0, params);
  std::vector<LdCoefficients> out;
  for (double nu : spectrum.frequencies) {
    LdCoefficients c;
    c.frequency = nu;
    c.heat = params.recoil / nu * (cos2 * lorentzian(nu, params) + alpha * l0);
    c.cool = params.recoil / nu * (cos2 * lorentzian(-nu, params) + alpha * l0);
    c.eta = std::abs(params.cos_theta0) * std::sqrt(params.recoil / nu);
    out.push_back(c);
  }
  return out;
}

double LDModeState::energy(const ModeSpectrum& spectrum) const {
  require(mean_occupations.size() == spectrum.size(), "state and spectrum differ in mode count");
  double e = 0.0;
  for (std::size_t b = 0; b < spectrum.size(); ++b)
    e += spectrum.frequencies[b] * (mean_occupations[b] + 0.5);
  return e;
}

namespace {

std::size_t geometric_cutoff(double mean, double tail) {
  if (mean <= 0.0) return 1;
  const double q = mean / (mean + 1.0);
  return static_cast<std::size_t>(std::ceil(std::log(tail) / std::log(q))) + 1;
}

double mean_of(const std::vector<double>& p) {
  double s = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) s += static_cast<double>(n) * p[n];
  return s;
}

}  // namespace

LDModeState ld_thermal_state(const std::vector<double>& mean_occupations, double tail) {
  LDModeState s;
  s.mean_occupations = mean_occupations;
  for (double m : mean_occupations) {
    require(m >= 0.0, "mean occupations must be >= 0");
    const std::size_t len = geometric_cutoff(m, tail);
    std::vector<double> p(len);
    const double q = m / (m + 1.0);
    double w = 1.0 / (m + 1.0);
    for (std::size_t n = 0; n < len; ++n, w *= q) p[n] = w;
    const double norm = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& x : p) x /= norm;
    s.populations.push_back(std::move(p));
  }
  return s;
}

std::vector<double> ld_steady_occupations(const std::vector<LdCoefficients>& coeffs) {
  std::vector<double> out;
  for (const auto& c : coeffs) {
    if (!(c.cool > c.heat)) {
      std::ostringstream msg;
      msg << "mode nu = " << c.frequency << " has A- = " << c.cool << " <= A+ = " << c.heat
          << "; no steady state";
      fail(ErrorCode::NoSteadyState, msg.str());
    }
    out.push_back(c.heat / (c.cool - c.heat));
  }
  return out;
}

std::vector<double> ld_mean_solution(const std::vector<LdCoefficients>& coeffs,
                                     const std::vector<double>& n0, double t) {
  require(coeffs.size() == n0.size(), "coefficient and occupation counts differ");
  std::vector<double> out;
  for (std::size_t b = 0; b < coeffs.size(); ++b) {
    const double k = coeffs[b].relaxation_rate();
    if (k == 0.0) {
      out.push_back(n0[b] + coeffs[b].heat * t);
      continue;
    }
    const double inf = coeffs[b].heat / k;
    out.push_back(inf + (n0[b] - inf) * std::exp(-k * t));
  }
  return out;
}

LdRun ld_evolve(const ModeSpectrum& spectrum, const CoolingParams& params,
                const LDModeState& initial, double t, double max_step_kappa) {
  require(t >= 0.0, "t must be >= 0");
  require(max_step_kappa > 0.0, "max_step_kappa must be > 0");
  params.validate();
  const auto coeffs = ld_coefficients(spectrum, params);
  const std::size_t modes = spectrum.size();
  LDModeState state = initial.populations.empty() ? ld_thermal_state(initial.mean_occupations)
                                                  : initial;
  require(state.populations.size() == modes, "initial state and spectrum differ in mode count");

  LdRun run;
  for (const auto& c : coeffs)
    if (c.eta > 0.3) {
      std::ostringstream msg;
      msg << "Lamb-Dicke parameter " << c.eta << " of mode nu = " << c.frequency
          << " is not << 1";
      run.warnings.push_back(msg.str());
    }

  for (std::size_t b = 0; b < modes; ++b) {
    const auto& c = coeffs[b];
    auto& p = state.populations[b];
    if (c.heat == 0.0 && c.cool == 0.0) continue;
    const double steady = ld_steady_occupations({c}).front();
    const std::size_t len = std::max(p.size(), geometric_cutoff(std::max(steady, mean_of(p)), 1e-13));
    p.resize(len, 0.0);

    const double kappa = c.relaxation_rate();
    const auto steps = static_cast<std::size_t>(std::ceil(t * kappa / max_step_kappa - 1e-9));
    if (steps == 0) continue;
    const double h = t / static_cast<double>(steps);
    run.steps = std::max(run.steps, steps);

    // (I - h W) p_new = p_old with W tridiagonal; reflecting at the top keeps sum p = 1.
    std::vector<double> lower(len), diag(len), upper(len), cp(len), dp(len);
    for (std::size_t n = 0; n < len; ++n) {
      const double nn = static_cast<double>(n);
      const double up = n + 1 < len ? c.heat * (nn + 1.0) : 0.0;
      const double down = c.cool * nn;
      diag[n] = 1.0 + h * (up + down);
      lower[n] = n > 0 ? -h * c.heat * nn : 0.0;                // from n-1
      upper[n] = n + 1 < len ? -h * c.cool * (nn + 1.0) : 0.0;  // from n+1
    }
    for (std::size_t s = 0; s < steps; ++s) {
      cp[0] = upper[0] / diag[0];
      dp[0] = p[0] / diag[0];
      for (std::size_t n = 1; n < len; ++n) {
        const double m = diag[n] - lower[n] * cp[n - 1];
        cp[n] = upper[n] / m;
        dp[n] = (p[n] - lower[n] * dp[n - 1]) / m;
      }
      p[len - 1] = dp[len - 1];
      for (std::size_t n = len - 1; n-- > 0;) p[n] = dp[n] - cp[n] * p[n + 1];
    }
  }
  for (std::size_t b = 0; b < modes; ++b) state.mean_occupations[b] = mean_of(state.populations[b]);
  run.state = std::move(state);
  return run;
}

}  // namespace crystalcool
