#include "crystalcool/ergodic_rate.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crystalcool/ergodic_kernel.hpp"
#include "crystalcool/errors.hpp"
#include "crystalcool/quadrature.hpp"

namespace crystalcool {

Deposit deposit_kernel(const EnergyGrid& grid, double e, double recoil, int n_ions,
                       const std::function<double(double)>& weight) {
  const KernelParams kp{e, recoil, n_ions};
  const auto& c = grid.centers();
  const double de = grid.delta_e();
  const double top = grid.upper_edge();
  const std::size_t last = c.size() - 1;
  Deposit out;

  auto add = [&](std::size_t i, double w) {
    if (w <= 0.0) return;
    if (!out.weights.empty() && out.weights.back().first == i)
      out.weights.back().second += w;
    else
      out.weights.emplace_back(i, w);
  };
  // Splits the mass of [a, b) between the centres that bracket it.
  auto segment = [&](double a, double b, double m0, double m1) {
    if (m0 <= 0.0) return;
    const double mid = 0.5 * (a + b);
    if (mid >= top) {
      out.leaked += m0;
    } else if (mid <= c.front()) {
      add(0, m0);
    } else if (mid >= c.back()) {
      add(last, m0);
    } else {
      const auto k = static_cast<std::size_t>(std::floor((mid - c.front()) / de));
      const std::size_t lo = std::min(k, last - 1);
      const double w_hi = std::clamp((m1 - c[lo] * m0) / de, 0.0, m0);
      add(lo, m0 - w_hi);
      add(lo + 1, w_hi);
    }
  };

  if (kp.is_delta()) {
    const double x = kp.center();
    const double w = weight ? weight(x) : 1.0;
    segment(x, x, w, w * x);
    return out;
  }

  const double s = 2.0 * std::sqrt(recoil * e);
  const double c_n = kernel_prefactor(n_ions);
  const GaussLegendre& gl = gauss_legendre(12);
  auto weighted = [&](double lo, double hi) {
    const double ua = std::asin(std::clamp((lo - kp.center()) / s, -1.0, 1.0));
    const double ub = std::asin(std::clamp((hi - kp.center()) / s, -1.0, 1.0));
    double m0 = 0.0, m1 = 0.0;
    const double half = 0.5 * (ub - ua), mid = 0.5 * (ub + ua);
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const double u = mid + half * gl.nodes[q];
      const double x = kp.center() + s * std::sin(u);
      const double w = gl.weights[q] * half * c_n * std::pow(std::cos(u), 2 * n_ions - 2) * weight(x);
      m0 += w;
      m1 += w * x;
    }
    return std::pair{m0, m1};
  };

  // Breakpoints: support ends, centres and the upper edge inside the support.
  const double a = kp.support_lo(), b = kp.support_hi();
  std::vector<double> cuts{a};
  const double first = std::ceil((a - c.front()) / de);
  for (double k = std::max(0.0, first); k <= static_cast<double>(last); k += 1.0) {
    const double x = c.front() + k * de;
    if (x >= b) break;
    if (x > a) cuts.push_back(x);
  }
  if (top > a && top < b) cuts.push_back(top);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (hi <= lo) continue;
    if (weight) {
      const auto [m0, m1] = weighted(lo, hi);
      segment(lo, hi, m0, m1);
    } else {
      segment(lo, hi, kernel_mass(kp, lo, hi), kernel_first_moment(kp, lo, hi));
    }
  }
  std::sort(out.weights.begin(), out.weights.end());
  return out;
}

ErgodicRateEquation::ErgodicRateEquation(const EnergyGrid& grid, const CoolingParams& params,
                                         const ErgodicOptions& options)
    : grid_(grid), params_(params), options_(options) {
  warnings_ = params_.validate();
  require(grid_.lower_edge() >= -1e-12, "ergodic grid must start at E >= 0");
  const std::size_t n = grid_.size();
  const auto& c = grid_.centers();
  const double cos2 = params_.cos_theta0 * params_.cos_theta0;
  const int ions = params_.n_ions;

  if (grid_.delta_e() > 0.1 * params_.gamma) {
    std::ostringstream msg;
    msg << "cell width " << grid_.delta_e() << " is not << hbar*gamma = " << params_.gamma;
    warnings_.push_back(msg.str());
  }

  // Emission matrix, averaged over the emission direction.
  const GaussLegendre& gl = gauss_legendre(options_.angular_nodes);
  std::vector<double> pattern_w(gl.nodes.size());
  double pattern_total = 0.0;
  for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
    pattern_w[q] = gl.weights[q] * params_.pattern.density(gl.nodes[q]);
    pattern_total += pattern_w[q];
  }
  for (double& w : pattern_w) w /= pattern_total;

  std::vector<Eigen::Triplet<double>> em_triplets;
  std::vector<double> em_leak(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> column(n, 0.0);
    std::size_t lo = n, hi = 0;
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const double r = params_.recoil * gl.nodes[q] * gl.nodes[q];
      const Deposit d = deposit_kernel(grid_, c[k], r, ions);
      for (const auto& [m, w] : d.weights) {
        column[m] += pattern_w[q] * w;
        lo = std::min(lo, m);
        hi = std::max(hi, m);
      }
      em_leak[k] += pattern_w[q] * d.leaked;
    }
    for (std::size_t m = lo; m <= hi && m < n; ++m)
      if (column[m] != 0.0)
        em_triplets.emplace_back(static_cast<int>(m), static_cast<int>(k), column[m]);
  }
  Eigen::SparseMatrix<double> emission(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  emission.setFromTriplets(em_triplets.begin(), em_triplets.end());

  // Absorption rates R(k <- i): the kernel weighted by L(E' - E_i).
  std::vector<Eigen::Triplet<double>> abs_triplets;
  leak_.assign(n, 0.0);
  const double r_abs = params_.recoil * cos2;
  for (std::size_t i = 0; i < n; ++i) {
    const double from = c[i];
    const Deposit d = deposit_kernel(grid_, from, r_abs, ions,
                                     [&](double x) { return lorentzian(x - from, params_); });
    for (const auto& [k, rate] : d.weights) {
      abs_triplets.emplace_back(static_cast<int>(k), static_cast<int>(i), rate);
      leak_[i] += rate * em_leak[k];
    }
    leak_[i] += d.leaked;
  }
  Eigen::SparseMatrix<double> absorption(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  absorption.setFromTriplets(abs_triplets.begin(), abs_triplets.end());

  Eigen::SparseMatrix<double> gain = emission * absorption;
  gain.prune(0.0);
  loss_.assign(n, 0.0);
  for (Eigen::Index col = 0; col < gain.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(gain, col); it; ++it)
      loss_[static_cast<std::size_t>(col)] += it.value();
  Eigen::SparseMatrix<double> diag(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<Eigen::Triplet<double>> d_triplets;
  for (std::size_t i = 0; i < n; ++i)
    d_triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), loss_[i]);
  diag.setFromTriplets(d_triplets.begin(), d_triplets.end());
  generator_ = gain - diag;
  generator_.makeCompressed();
}

double ErgodicRateEquation::max_loss_rate() const {
  return *std::max_element(loss_.begin(), loss_.end());
}

double ErgodicRateEquation::max_stable_dt() const {
  const double m = max_loss_rate();
  return m > 0.0 ? options_.dt_safety / m : std::numeric_limits<double>::infinity();
}

ErgodicRun ErgodicRateEquation::evolve(const EnergyDistribution& p0, double t_final, double dt,
                                       std::size_t record_every) const {
  require(p0.p.size() == grid_.size() && p0.grid.delta_e() == grid_.delta_e(),
          "initial distribution must live on the integrator grid");
  require(t_final >= 0.0, "t_final must be >= 0");
  require(dt > 0.0, "dt must be > 0");
  require(record_every >= 1, "record_every must be >= 1");
  if (dt > max_stable_dt() * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "dt = " << dt << " exceeds the stability bound " << max_stable_dt()
        << " (0.1 / max loss rate)";
    fail(ErrorCode::StepTooLarge, msg.str());
  }
  const std::size_t n = grid_.size();
  const double de = grid_.delta_e();
  const auto& c = grid_.centers();
  Eigen::VectorXd mass(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) mass(static_cast<Eigen::Index>(i)) = p0.p[i] * de;

  ErgodicRun run{p0, {}, 0.0, 0.0, 0.0, 0, warnings_};
  auto mean = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += c[i] * mass(static_cast<Eigen::Index>(i));
    return s;
  };
  const double initial_norm = mass.sum();
  run.max_norm_error = std::abs(initial_norm - 1.0);
  run.trajectory.emplace_back(0.0, mean());
  run.min_density = mass.minCoeff() / de;

  const auto steps = static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
  const double h = steps > 0 ? t_final / static_cast<double>(steps) : 0.0;
  Eigen::VectorXd rate(static_cast<Eigen::Index>(n));
  for (std::size_t s = 1; s <= steps; ++s) {
    rate.noalias() = generator_ * mass;
    double leak = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      leak += leak_[i] * mass(static_cast<Eigen::Index>(i));
      total += loss_[i] * mass(static_cast<Eigen::Index>(i));
    }
    if (total > 0.0) run.max_leak_fraction = std::max(run.max_leak_fraction, leak / (leak + total));
    mass += h * rate;
    const double mn = mass.minCoeff();
    run.min_density = std::min(run.min_density, mn / de);
    if (mn < -1e-12) {
      std::ostringstream msg;
      msg << "negative cell population " << mn << " at t = " << h * static_cast<double>(s);
      fail(ErrorCode::NegativeDensity, msg.str());
    }
    run.max_norm_error = std::max(run.max_norm_error, std::abs(mass.sum() - 1.0));
    if (s % record_every == 0 || s == steps)
      run.trajectory.emplace_back(h * static_cast<double>(s), mean());
  }
  run.steps = steps;
  for (std::size_t i = 0; i < n; ++i) run.final.p[i] = mass(static_cast<Eigen::Index>(i)) / de;
  if (run.max_leak_fraction > options_.leak_warning) {
    std::ostringstream msg;
    msg << "gain leaking past the grid top reached " << run.max_leak_fraction
        << " of the total; extend e_max";
    run.warnings.push_back(msg.str());
  }
  const double e_end = run.trajectory.back().second;
  if (e_end < 10.0 * de) {
    std::ostringstream msg;
    msg << "mean energy " << e_end << " is not >> cell width " << de;
    run.warnings.push_back(msg.str());
  }
  return run;
}

EnergyDistribution ErgodicRateEquation::steady_state() const {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  // Replace the last balance equation by the normalization sum P = 1.
  std::vector<Eigen::Triplet<double>> t;
  for (Eigen::Index col = 0; col < generator_.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(generator_, col); it; ++it)
      if (it.row() != n - 1) t.emplace_back(static_cast<int>(it.row()), static_cast<int>(col), it.value());
  for (Eigen::Index col = 0; col < n; ++col) t.emplace_back(static_cast<int>(n - 1), static_cast<int>(col), 1.0);
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) fail(ErrorCode::NoSteadyState, "steady-state factorization failed");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  const Eigen::VectorXd mass = lu.solve(rhs);
  EnergyDistribution out{grid_, std::vector<double>(static_cast<std::size_t>(n))};
  for (Eigen::Index i = 0; i < n; ++i)
    out.p[static_cast<std::size_t>(i)] = std::max(0.0, mass(i)) / grid_.delta_e();
  const double norm = out.norm();
  for (double& x : out.p) x /= norm;
  return out;
}

ErgodicRun evolve_ergodic(const EnergyDistribution& p0, const CoolingParams& params,
                          const ModeSpectrum& spectrum, double t_final, double dt,
                          std::size_t record_every) {
  ErgodicRateEquation eq(p0.grid, params);
  ErgodicRun run = eq.evolve(p0, t_final, dt, record_every);
  if (!spectrum.frequencies.empty() && params.gamma < spectrum.frequencies.back()) {
    std::ostringstream msg;
    msg << "gamma = " << params.gamma << " is below the highest mode frequency "
        << spectrum.frequencies.back() << "; the ergodic regime needs gamma > nu_N";
    run.warnings.push_back(msg.str());
  }
  return run;
}

}  // namespace crystalcool
