#include "crystalcool/franck_condon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "crystalcool/errors.hpp"
#include "crystalcool/spectrum.hpp"

namespace crystalcool {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

FockState::FockState(std::vector<int> occupations, std::span<const double> frequencies)
    : occupations_(std::move(occupations)), energy_(0.0) {
  if (occupations_.size() != frequencies.size())
    fail(ErrorCode::DimensionMismatch, "Fock state and spectrum differ in mode count");
  for (std::size_t a = 0; a < occupations_.size(); ++a) {
    require(occupations_[a] >= 0, "occupation numbers must be >= 0");
    energy_ += (occupations_[a] + 0.5) * frequencies[a];
  }
}

double FcAmplitude::magnitude() const { return std::exp(log_magnitude); }

double FcAmplitude::probability() const { return std::exp(2.0 * log_magnitude); }

std::complex<double> FcAmplitude::value() const {
  const double m = sign * magnitude();
  switch (((quarter_turns % 4) + 4) % 4) {
    case 0: return {m, 0.0};
    case 1: return {0.0, m};
    case 2: return {-m, 0.0};
    default: return {0.0, -m};
  }
}

LogValue laguerre_log(int r, int a, double x) {
  require(r >= 0 && a >= 0, "Laguerre degree and order must be >= 0");
  if (r == 0) return {0.0, 1};
  constexpr double kBig = 1e150;
  double log_scale = 0.0;
  double prev = 1.0;
  double cur = 1.0 + a - x;
  for (int k = 1; k < r; ++k) {
    const double next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
    if (std::abs(cur) > kBig) {
      prev /= kBig;
      cur /= kBig;
      log_scale += std::log(kBig);
    }
  }
  if (cur == 0.0) return {kNegInf, 1};
  return {std::log(std::abs(cur)) + log_scale, cur < 0.0 ? -1 : 1};
}

FcAmplitude fc_single_parts(int n, int l, double eta) {
  require(n >= 0 && l >= 0, "Fock numbers must be >= 0");
  const int r = std::min(n, l);
  const int d = std::abs(l - n);
  FcAmplitude out;
  out.quarter_turns = d % 4;
  if (eta == 0.0) {
    out.log_magnitude = d == 0 ? 0.0 : kNegInf;
    return out;
  }
  const double x = eta * eta;
  const LogValue lag = laguerre_log(r, d, x);
  out.log_magnitude = -0.5 * x + 0.5 * (std::lgamma(r + 1.0) - std::lgamma(r + d + 1.0)) +
                      d * std::log(std::abs(eta)) + lag.log_abs;
  out.sign = lag.sign * ((eta < 0.0 && d % 2 == 1) ? -1 : 1);
  return out;
}

std::complex<double> fc_single(int n, int l, double eta) {
  return fc_single_parts(n, l, eta).value();
}

double fc_probability(int n, int l, double eta) {
  return fc_single_parts(n, l, eta).probability();
}

std::complex<double> fc_multi(const FockState& n, const FockState& l,
                              std::span<const double> eta_row) {
  if (n.modes() != l.modes() || n.modes() != eta_row.size())
    fail(ErrorCode::DimensionMismatch, "fc_multi: states and eta row differ in mode count");
  FcAmplitude total;
  for (std::size_t a = 0; a < n.modes(); ++a) {
    const FcAmplitude p = fc_single_parts(n.occupations()[a], l.occupations()[a], eta_row[a]);
    total.log_magnitude += p.log_magnitude;
    total.sign *= p.sign;
    total.quarter_turns += p.quarter_turns;
  }
  return total.value();
}

namespace {

// |<k|D(eta)|n>|^2 for k in [lo, hi].
struct ModeWindow {
  int lo = 0;
  int hi = 0;
  std::vector<double> weight;

  double mass() const {
    double s = 0.0;
    for (double w : weight) s += w;
    return s;
  }
};

ModeWindow build_window(int n, double eta, int max_window) {
  const double eta_abs = std::abs(eta);
  int half = std::min(max_window, 10 + static_cast<int>(std::ceil(20.0 * eta_abs * std::sqrt(n + 1.0))));
  auto fill = [&](int h) {
    ModeWindow w;
    w.lo = std::max(0, n - h);
    w.hi = n + h;
    w.weight.resize(static_cast<std::size_t>(w.hi - w.lo + 1));
    for (int k = w.lo; k <= w.hi; ++k)
      w.weight[static_cast<std::size_t>(k - w.lo)] = fc_probability(n, k, eta);
    return w;
  };
  ModeWindow w = fill(half);
  while (1.0 - w.mass() > 1e-11) {
    if (half >= max_window) {
      std::ostringstream msg;
      msg << "completeness " << w.mass() << " after window " << half << " for n=" << n
          << ", eta=" << eta;
      fail(ErrorCode::TruncationInsufficient, msg.str());
    }
    half = std::min(max_window, 2 * half);
    w = fill(half);
  }
  // Margin so the neglected tail is negligible even when weighted by (k-n)^2.
  return fill(half + half / 2 + 5);
}

}  // namespace

MomentResult moments_bruteforce(const FockState& n, const ModeSpectrum& spectrum,
                                const ChainConfig& config, double cos_theta, int max_window) {
  if (n.modes() != spectrum.size())
    fail(ErrorCode::DimensionMismatch, "Fock state and spectrum differ in mode count");
  const LambDickeSet ld = lamb_dicke(spectrum, config, cos_theta);
  const std::size_t modes = spectrum.size();
  const auto& nu = spectrum.frequencies;
  const auto& occ = n.occupations();

  MomentResult out;
  out.completeness = 1.0;
  for (std::size_t j = 0; j < modes; ++j) {
    std::vector<ModeWindow> win;
    win.reserve(modes);
    for (std::size_t a = 0; a < modes; ++a)
      win.push_back(build_window(occ[a], ld.eta(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(a)), max_window));

    // Odometer over the product box of final states k.
    std::vector<int> k(modes);
    for (std::size_t a = 0; a < modes; ++a) k[a] = win[a].lo;
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    while (true) {
      double w = 1.0;
      double de = 0.0;
      for (std::size_t a = 0; a < modes; ++a) {
        w *= win[a].weight[static_cast<std::size_t>(k[a] - win[a].lo)];
        de += nu[a] * (k[a] - occ[a]);
      }
      s0 += w;
      s1 += w * de;
      s2 += w * de * de;
      std::size_t a = 0;
      for (; a < modes; ++a) {
        if (++k[a] <= win[a].hi) break;
        k[a] = win[a].lo;
      }
      if (a == modes) break;
    }
    out.m1_per_ion.push_back(s1);
    out.m2_per_ion.push_back(s2);
    out.completeness = std::min(out.completeness, s0);
    out.m1 += s1 / static_cast<double>(modes);
    out.m2 += s2 / static_cast<double>(modes);
  }
  if (!(1.0 - out.completeness <= 1e-10)) {
    std::ostringstream msg;
    msg << "final-state sum reached completeness " << out.completeness;
    fail(ErrorCode::TruncationInsufficient, msg.str());
  }
  return out;
}

double moment1_closed(const ChainConfig& config, double cos_theta) {
  return config.recoil_frequency * cos_theta * cos_theta;
}

double moment2_closed_ion(const FockState& n, const ModeSpectrum& spectrum,
                          const ChainConfig& config, double cos_theta, std::size_t ion) {
  const double recoil = moment1_closed(config, cos_theta);
  double s = 0.0;
  for (std::size_t a = 0; a < spectrum.size(); ++a) {
    const double b = spectrum.eigenvectors(static_cast<Eigen::Index>(ion), static_cast<Eigen::Index>(a));
    s += spectrum.frequencies[a] * (2.0 * n.occupations()[a] + 1.0) * b * b;
  }
  return recoil * s + recoil * recoil;
}

double moment2_closed_average(const FockState& n, const ChainConfig& config, double cos_theta) {
  const double recoil = moment1_closed(config, cos_theta);
  return 2.0 * recoil * n.energy() / static_cast<double>(n.modes()) + recoil * recoil;
}

ShellCoupling average_coupling_bruteforce(double e_from, double e_to, double delta_e,
                                          const ModeSpectrum& spectrum,
                                          const ChainConfig& config, double cos_theta,
                                          std::uint64_t budget) {
  require(delta_e > 0.0, "shell width must be > 0");
  const std::size_t modes = spectrum.size();
  const LambDickeSet ld = lamb_dicke(spectrum, config, cos_theta);
  const auto& nu = spectrum.frequencies;

  // Per (ion, mode) probability tables |fc(n, k)|^2 over the occupations reachable
  // inside the two shells.
  const double top = std::max(e_from, e_to) + 0.5 * delta_e;
  std::vector<int> nmax(modes);
  for (std::size_t a = 0; a < modes; ++a)
    nmax[a] = static_cast<int>(std::ceil(top / nu[a])) + 1;
  std::vector<std::vector<std::vector<double>>> table(modes * modes);
  for (std::size_t j = 0; j < modes; ++j)
    for (std::size_t a = 0; a < modes; ++a) {
      const double eta = ld.eta(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(a));
      auto& t = table[j * modes + a];
      t.assign(static_cast<std::size_t>(nmax[a] + 1),
               std::vector<double>(static_cast<std::size_t>(nmax[a] + 1)));
      for (int p = 0; p <= nmax[a]; ++p)
        for (int q = p; q <= nmax[a]; ++q)
          t[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] =
              t[static_cast<std::size_t>(q)][static_cast<std::size_t>(p)] = fc_probability(p, q, eta);
    }

  const double lo_to = e_to - 0.5 * delta_e, hi_to = e_to + 0.5 * delta_e;
  ShellCoupling out{e_from, e_to, 0.0, 0, 0};
  double sum = 0.0;
  std::uint64_t pairs = 0;
  for_each_state(
      spectrum, e_from - 0.5 * delta_e, e_from + 0.5 * delta_e,
      [&](std::span<const int> n, double) {
        ++out.d_from;
        std::uint64_t d_to = 0;
        for_each_state(
            spectrum, lo_to, hi_to,
            [&](std::span<const int> k, double) {
              ++d_to;
              if (++pairs > budget) {
                std::ostringstream msg;
                msg << "shell coupling exceeded budget of " << budget << " state pairs";
                fail(ErrorCode::BudgetExceeded, msg.str());
              }
              for (std::size_t j = 0; j < modes; ++j) {
                double w = 1.0;
                for (std::size_t a = 0; a < modes; ++a)
                  w *= table[j * modes + a][static_cast<std::size_t>(n[a])][static_cast<std::size_t>(k[a])];
                sum += w;
              }
            },
            budget);
        out.d_to = d_to;
      },
      budget);
  if (out.d_from == 0 || out.d_to == 0)
    fail(ErrorCode::InvalidArgument, "average coupling requires two non-empty shells");
  out.q = sum / (static_cast<double>(modes) * static_cast<double>(out.d_from) *
                 static_cast<double>(out.d_to));
  return out;
}

double LdWeights::total() const {
  double s = carrier;
  for (double b : blue) s += b;
  for (double r : red) s += r;
  return s;
}

LdWeights ld_weights(const FockState& n, std::span<const double> eta_row) {
  if (n.modes() != eta_row.size())
    fail(ErrorCode::DimensionMismatch, "ld_weights: eta row and state differ in mode count");
  LdWeights w;
  w.blue.resize(n.modes());
  w.red.resize(n.modes());
  for (std::size_t b = 0; b < n.modes(); ++b) {
    const double e2 = eta_row[b] * eta_row[b];
    const double nb = n.occupations()[b];
    w.carrier -= e2 * (2.0 * nb + 1.0);
    w.blue[b] = e2 * (nb + 1.0);
    w.red[b] = e2 * nb;
    if (std::abs(eta_row[b]) > 0.3) w.outside_regime = true;
  }
  return w;
}

LdWeights ld_weights(const FockState& n, const ModeSpectrum& spectrum,
                     const ChainConfig& config, double cos_theta, std::size_t ion) {
  require(ion < spectrum.size(), "ion index out of range");
  return ld_weights(n, lamb_dicke(spectrum, config, cos_theta).row(ion));
}

}  // namespace crystalcool
