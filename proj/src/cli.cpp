#include "crystalcool/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "crystalcool/cooling_dynamics.hpp"
#include "crystalcool/ergodic_kernel.hpp"
#include "crystalcool/ergodic_rate.hpp"
#include "crystalcool/errors.hpp"
#include "crystalcool/franck_condon.hpp"
#include "crystalcool/ion_chain.hpp"
#include "crystalcool/lamb_dicke_dynamics.hpp"
#include "crystalcool/spectrum.hpp"
#include "crystalcool/verify.hpp"

namespace crystalcool::cli {

namespace {

constexpr const char* kUnits =
    "hbar = 1, nu_1 = 1: energies in hbar*nu_1, rates and frequencies in nu_1, time in 1/nu_1";

struct RunConfig {
  std::string subcommand;
  int n = 3;
  double de = 0.2;
  double emax = 0.0;  // 0 picks a per-subcommand default
  double gamma = 50.0;
  double delta = -25.0;
  double rabi = 1.0;
  double recoil = 0.25;
  double cos_theta0 = 1.0;
  std::string pattern = "isotropic";
  int m_driven = 1;
  double t_final = 0.0;  // 0 picks a per-subcommand default
  std::uint64_t seed = 20061;
  std::string out_dir;
  // fc / kernel
  double e = 50.0;
  double e_to = -1.0;  // < 0 scans every target shell in the kernel support
  std::vector<int> kernel_ions{1, 10, 100};
  int points = 400;
  // cool / ld
  double u0 = 0.0;  // 0 picks twice the steady thermal scale
  double dt = 0.0;  // 0 picks the stability bound
  int record_every = 10;
  std::vector<int> only;
};

std::string num(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

class Table {
 public:
  Table(std::string name, std::vector<std::string> columns)
      : name_(std::move(name)), columns_(std::move(columns)) {}
  void row(const std::vector<double>& values) { rows_.push_back(values); }
  const std::string& name() const { return name_; }
  void write(std::ostream& os) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
    os << "\n";
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << num(r[i]);
      os << "\n";
    }
  }

 private:
  std::string name_;
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

struct Output {
  std::vector<Table> tables;
  std::vector<std::pair<std::string, std::string>> results;
  std::vector<std::string> warnings;
  std::vector<std::string> lines;  // plain text (verify)
  int status = 0;
};

ChainConfig chain_config(const RunConfig& rc) {
  ChainConfig c{rc.n, 1.0, rc.recoil};
  c.validate();
  return c;
}

CoolingParams cooling_params(const RunConfig& rc, std::vector<std::string>& warnings) {
  CoolingParams p;
  p.gamma = rc.gamma;
  p.detuning = rc.delta;
  p.rabi = rc.rabi;
  p.recoil = rc.recoil;
  p.cos_theta0 = rc.cos_theta0;
  p.pattern = EmissionPattern::from_name(rc.pattern);
  p.m_driven = rc.m_driven;
  p.n_ions = rc.n;
  for (auto& w : p.validate()) warnings.push_back(std::move(w));
  return p;
}

Output cmd_modes(const RunConfig& rc) {
  const ChainConfig config = chain_config(rc);
  const EquilibriumPositions eq = solve_equilibrium(config);
  const ModeSpectrum s = solve_modes(hessian(eq));
  std::vector<std::string> cols{"mode", "frequency"};
  for (int j = 1; j <= rc.n; ++j) cols.push_back("b_" + std::to_string(j));
  Table modes("modes", cols);
  for (std::size_t a = 0; a < s.size(); ++a) {
    std::vector<double> r{static_cast<double>(a + 1), s.frequencies[a]};
    for (int j = 0; j < rc.n; ++j) r.push_back(s.eigenvectors(j, static_cast<Eigen::Index>(a)));
    modes.row(r);
  }
  Table pos("positions", {"ion", "position"});
  for (std::size_t j = 0; j < eq.positions.size(); ++j)
    pos.row({static_cast<double>(j + 1), eq.positions[j]});
  Output o;
  o.tables = {modes, pos};
  o.results = {{"equilibrium_residual", num(eq.residual)},
               {"ground_energy", num(s.ground_energy())}};
  return o;
}

Output cmd_dos(const RunConfig& rc) {
  const ModeSpectrum s = chain_modes(chain_config(rc));
  const double emax = rc.emax > 0.0 ? rc.emax : 30.0;
  const EnergyGrid grid = EnergyGrid::spanning(0.5 * rc.de, emax, rc.de);
  const ShellCensus census = count_states(s, grid);
  Table staircase("dos_census", {"energy", "count"});
  Table smooth("dos_smooth", {"energy", "g_times_de"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double e = grid.centers()[i];
    staircase.row({e, static_cast<double>(census.counts[i])});
    smooth.row({e, smooth_density(s, e) * rc.de});
  }
  Output o;
  o.tables = {staircase, smooth};
  o.results = {{"total_states", std::to_string(census.total())},
               {"ground_energy", num(s.ground_energy())}};
  const auto sparse = sparse_shells(census);
  std::size_t occupied_sparse = 0;
  for (std::size_t i : sparse)
    if (grid.centers()[i] >= s.ground_energy()) ++occupied_sparse;
  if (occupied_sparse > 0)
    o.warnings.push_back(std::to_string(occupied_sparse) +
                         " shells above the ground energy hold fewer than 10 states");
  return o;
}

Output cmd_fc(const RunConfig& rc) {
  const ChainConfig config = chain_config(rc);
  const ModeSpectrum s = chain_modes(config);
  const double r = rc.recoil * rc.cos_theta0 * rc.cos_theta0;
  std::vector<double> targets;
  if (rc.e_to >= 0.0) {
    targets.push_back(rc.e_to);
  } else {
    const KernelParams kp{rc.e, r, rc.n};
    const double lo = std::ceil((kp.support_lo() - rc.e) / rc.de);
    const double hi = std::floor((kp.support_hi() - rc.e) / rc.de);
    for (double k = lo; k <= hi; k += 1.0)
      if (rc.e + k * rc.de > 0.0) targets.push_back(rc.e + k * rc.de);
  }
  Table t("fc_coupling", {"e_from", "e_to", "d_from", "d_to", "q_bruteforce", "q_classical"});
  for (double e_to : targets) {
    const ShellCoupling sc = average_coupling_bruteforce(rc.e, e_to, rc.de, s, config, rc.cos_theta0);
    t.row({sc.e_from, sc.e_to, static_cast<double>(sc.d_from), static_cast<double>(sc.d_to), sc.q,
           r > 0.0 ? q_classical(rc.e, e_to, s, r) : 0.0});
  }
  Output o;
  o.tables = {t};
  o.results = {{"effective_recoil", num(r)}};
  const double nu_top = s.frequencies.back();
  if (rc.e < 20.0 * nu_top || rc.de < 2.0 * nu_top)
    o.warnings.push_back("shells outside E >= 20 nu_N, dE >= 2 nu_N; classical agreement not expected");
  return o;
}

Output cmd_kernel(const RunConfig& rc) {
  const double r = rc.recoil * rc.cos_theta0 * rc.cos_theta0;
  require(rc.points >= 2, "--points must be >= 2");
  Table t("kernel", {"n_ions", "e_prime", "f", "g_times_q"});
  for (int n_ions : rc.kernel_ions) {
    const KernelParams kp{rc.e, r, n_ions};
    kp.validate();
    const ModeSpectrum s = chain_modes(ChainConfig{n_ions, 1.0, rc.recoil});
    const double lo = kp.support_lo(), hi = kp.support_hi();
    for (int i = 0; i < rc.points; ++i) {
      const double x = lo + (hi - lo) * (i + 0.5) / rc.points;
      const double gq = x > 0.0 ? smooth_density(s, x) * q_classical(rc.e, x, s, r) : 0.0;
      t.row({static_cast<double>(n_ions), x, kernel_f(kp, x), gq});
    }
  }
  Output o;
  o.tables = {t};
  o.results = {{"effective_recoil", num(r)}};
  return o;
}

Output cmd_cool(const RunConfig& rc) {
  Output o;
  const CoolingParams p = cooling_params(rc, o.warnings);
  const ModeSpectrum s = chain_modes(chain_config(rc));
  const double e_inf = steady_energy(p);
  const double u0 = rc.u0 > 0.0 ? rc.u0 : 2.0 * e_inf / rc.n;
  const double emax = rc.emax > 0.0 ? rc.emax : 25.0 * std::max(u0, e_inf / rc.n) * 2.0;
  const EnergyGrid grid = EnergyGrid::spanning(0.5 * rc.de, emax, rc.de);
  const double gamma_cool = cooling_rate(p);
  const double t_final = rc.t_final > 0.0 ? rc.t_final : std::log(40.0) / gamma_cool;

  const ErgodicRateEquation eq(grid, p);
  const double dt = rc.dt > 0.0 ? rc.dt : eq.max_stable_dt();
  const EnergyDistribution p0 = thermal_distribution(rc.n, u0, grid);
  ErgodicRun run = eq.evolve(p0, t_final, dt, static_cast<std::size_t>(rc.record_every));
  if (p.gamma < s.frequencies.back())
    run.warnings.push_back("gamma is below the highest mode frequency; ergodic regime needs gamma > nu_N");
  const EnergyDistribution steady = eq.steady_state();
  const EnergyDistribution fp = fp_steady(p, grid);
  const EnergyDistribution fp_t = fp_evolution_distribution(p, u0, t_final, grid);

  Table traj("trajectory", {"t", "mean_energy", "mean_energy_fp"});
  for (const auto& [t, e] : run.trajectory) traj.row({t, e, fp_evolution(p, u0, t).mean_energy()});
  Table dist("distribution", {"energy", "p_initial", "p_final", "p_fp_final", "p_steady", "p_fp_steady"});
  for (std::size_t i = 0; i < grid.size(); ++i)
    dist.row({grid.centers()[i], p0.p[i], run.final.p[i], fp_t.p[i], steady.p[i], fp.p[i]});
  o.tables = {traj, dist};
  const double fitted = fit_relaxation_rate(run.trajectory, steady.mean_energy());
  o.results = {{"u0", num(u0)},
               {"emax_used", num(emax)},
               {"t_final_used", num(t_final)},
               {"dt_used", num(dt)},
               {"steps", std::to_string(run.steps)},
               {"fp_c", num(fp_coefficients(p).c)},
               {"steady_energy_fp", num(e_inf)},
               {"steady_energy_ergodic", num(steady.mean_energy())},
               {"l1_steady_vs_fp", num(steady.l1_distance(fp))},
               {"cooling_rate_fp", num(gamma_cool)},
               {"cooling_rate_fitted", num(fitted)},
               {"max_norm_error", num(run.max_norm_error)},
               {"min_density", num(run.min_density)},
               {"max_leak_fraction", num(run.max_leak_fraction)}};
  for (auto& w : run.warnings) o.warnings.push_back(std::move(w));
  return o;
}

Output cmd_ld(const RunConfig& rc) {
  Output o;
  const CoolingParams p = cooling_params(rc, o.warnings);
  const ModeSpectrum s = chain_modes(chain_config(rc));
  const auto coeffs = ld_coefficients(s, p);
  const std::vector<double> steady = ld_steady_occupations(coeffs);
  double slowest = std::numeric_limits<double>::infinity();
  for (const auto& c : coeffs) slowest = std::min(slowest, c.relaxation_rate());
  const double t_final = rc.t_final > 0.0 ? rc.t_final : 10.0 / slowest;
  // Initial state: thermal at u0 per mode energy, or twice the steady occupations.
  std::vector<double> n0;
  for (std::size_t b = 0; b < s.size(); ++b)
    n0.push_back(rc.u0 > 0.0 ? std::max(0.0, rc.u0 / s.frequencies[b] - 0.5) : 2.0 * steady[b]);

  std::vector<std::string> cols{"t", "energy", "energy_closed_form"};
  for (std::size_t b = 0; b < s.size(); ++b) cols.push_back("n_" + std::to_string(b + 1));
  Table traj("ld_trajectory", cols);
  LDModeState state = ld_thermal_state(n0);
  const int samples = std::max(2, rc.points);
  auto record = [&](double t) {
    const std::vector<double> closed = ld_mean_solution(coeffs, n0, t);
    double e_closed = 0.0;
    for (std::size_t b = 0; b < s.size(); ++b) e_closed += s.frequencies[b] * (closed[b] + 0.5);
    std::vector<double> r{t, state.energy(s), e_closed};
    r.insert(r.end(), state.mean_occupations.begin(), state.mean_occupations.end());
    traj.row(r);
  };
  record(0.0);
  for (int i = 1; i < samples; ++i) {
    const double h = t_final / (samples - 1);
    LdRun run = ld_evolve(s, p, state, h);
    state = std::move(run.state);
    if (i == 1)
      for (auto& w : run.warnings) o.warnings.push_back(std::move(w));
    record(h * i);
  }
  Table modes("ld_modes", {"mode", "frequency", "eta", "a_plus", "a_minus", "n_steady", "n_final"});
  double e_steady = 0.0;
  for (std::size_t b = 0; b < s.size(); ++b) {
    modes.row({static_cast<double>(b + 1), s.frequencies[b], coeffs[b].eta, coeffs[b].heat,
               coeffs[b].cool, steady[b], state.mean_occupations[b]});
    e_steady += s.frequencies[b] * (steady[b] + 0.5);
  }
  o.tables = {traj, modes};
  o.results = {{"t_final_used", num(t_final)},
               {"steady_energy_ld", num(e_steady)},
               {"steady_energy_fp", num(steady_energy(p))}};
  return o;
}

Output cmd_verify(const RunConfig& rc) {
  Output o;
  VerifyOptions options;
  options.seed = rc.seed;
  int failed = 0;
  for (const auto& check : acceptance_checks()) {
    if (!rc.only.empty() && std::find(rc.only.begin(), rc.only.end(), check.id) == rc.only.end())
      continue;
    const CheckResult r = run_check(check, options);
    o.lines.push_back(format_result(r));
    o.results.emplace_back("check_" + std::to_string(r.id) + "_" + r.name, r.passed ? "pass" : "fail");
    if (!r.passed) ++failed;
  }
  o.results.emplace_back("failed", std::to_string(failed));
  o.status = failed == 0 ? 0 : 1;
  return o;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

std::vector<std::pair<std::string, std::string>> manifest_entries(const RunConfig& rc) {
  return {{"subcommand", rc.subcommand},
          {"units", kUnits},
          {"n", std::to_string(rc.n)},
          {"de", num(rc.de)},
          {"emax", num(rc.emax)},
          {"gamma", num(rc.gamma)},
          {"delta", num(rc.delta)},
          {"rabi", num(rc.rabi)},
          {"recoil", num(rc.recoil)},
          {"cos_theta0", num(rc.cos_theta0)},
          {"pattern", rc.pattern},
          {"m_driven", std::to_string(rc.m_driven)},
          {"t_final", num(rc.t_final)},
          {"seed", std::to_string(rc.seed)},
          {"e", num(rc.e)},
          {"e_to", num(rc.e_to)},
          {"kernel_ions", join(rc.kernel_ions)},
          {"points", std::to_string(rc.points)},
          {"u0", num(rc.u0)},
          {"dt", num(rc.dt)},
          {"record_every", std::to_string(rc.record_every)},
          {"only", join(rc.only)}};
}

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

void emit(const RunConfig& rc, const Output& o, std::ostream& out) {
  if (rc.out_dir.empty()) {
    for (const auto& line : o.lines) out << line << "\n";
    for (std::size_t i = 0; i < o.tables.size(); ++i) {
      if (o.tables.size() > 1) out << (i ? "\n" : "") << "# " << o.tables[i].name() << "\n";
      o.tables[i].write(out);
    }
    for (const auto& w : o.warnings) out << "# warning: " << one_line(w) << "\n";
    return;
  }
  namespace fs = std::filesystem;
  const fs::path dir(rc.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create output directory " + rc.out_dir + ": " + ec.message());
  std::vector<std::string> artifacts;
  auto open = [&](const std::string& name) {
    std::ofstream f(dir / name);
    if (!f) fail(ErrorCode::Io, "cannot write " + (dir / name).string());
    return f;
  };
  for (const auto& t : o.tables) {
    auto f = open(t.name() + ".csv");
    t.write(f);
    artifacts.push_back(t.name() + ".csv");
  }
  if (!o.lines.empty()) {
    auto f = open("verify.txt");
    for (const auto& line : o.lines) f << line << "\n";
    artifacts.push_back("verify.txt");
  }
  auto m = open("manifest.txt");
  for (const auto& [k, v] : manifest_entries(rc)) m << k << "=" << v << "\n";
  for (const auto& [k, v] : o.results) m << "result." << k << "=" << v << "\n";
  for (std::size_t i = 0; i < o.warnings.size(); ++i)
    m << "warning." << i << "=" << one_line(o.warnings[i]) << "\n";
  for (std::size_t i = 0; i < artifacts.size(); ++i) m << "artifact." << i << "=" << artifacts[i] << "\n";
  for (const auto& line : o.lines) out << line << "\n";
  out << "wrote " << artifacts.size() << " tables and manifest.txt to " << rc.out_dir << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig rc;
  CLI::App app{"Doppler cooling of a linear Coulomb crystal: modes, state counting, "
               "Franck-Condon couplings, ergodic and Lamb-Dicke cooling dynamics.\n"
               "Units: " + std::string(kUnits) + ".\n"
               "Precedence: command-line flags override --config entries, which override defaults.",
               "crystalcool"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "Read key = value settings (TOML/INI) from a file");

  app.add_option("--n", rc.n, "Number of ions N")->capture_default_str();
  app.add_option("--de", rc.de, "Shell width Delta E")->capture_default_str();
  app.add_option("--emax", rc.emax, "Upper grid energy (0: subcommand default)")->capture_default_str();
  app.add_option("--gamma", rc.gamma, "Linewidth gamma")->capture_default_str();
  app.add_option("--delta", rc.delta, "Detuning delta (negative is red)")->capture_default_str();
  app.add_option("--rabi", rc.rabi, "Rabi frequency Omega")->capture_default_str();
  app.add_option("--recoil", rc.recoil, "Recoil frequency omega_R")->capture_default_str();
  app.add_option("--cos-theta0", rc.cos_theta0, "cos of the laser angle to the trap axis")
      ->capture_default_str();
  app.add_option("--pattern", rc.pattern, "Emission pattern")
      ->check(CLI::IsMember({"isotropic", "dipole_linear", "dipole_circular"}))
      ->capture_default_str();
  app.add_option("--m-driven", rc.m_driven, "Number of driven ions M")->capture_default_str();
  app.add_option("--t-final", rc.t_final, "Final time (0: subcommand default)")->capture_default_str();
  app.add_option("--seed", rc.seed, "Seed for randomized checks")->capture_default_str();
  app.add_option("--out", rc.out_dir, "Write tables and manifest.txt into this directory");
  app.add_option("--e", rc.e, "Source shell energy (fc, kernel)")->capture_default_str();
  app.add_option("--e-to", rc.e_to, "Single target shell for fc (negative: scan)")->capture_default_str();
  app.add_option("--kernel-ions", rc.kernel_ions, "Ion numbers for kernel curves")->capture_default_str();
  app.add_option("--points", rc.points, "Samples per curve (kernel, ld)")->capture_default_str();
  app.add_option("--u0", rc.u0, "Initial thermal scale U0 (0: twice the steady value)")
      ->capture_default_str();
  app.add_option("--dt", rc.dt, "Time step for cool (0: stability bound)")->capture_default_str();
  app.add_option("--record-every", rc.record_every, "Trajectory stride for cool")->capture_default_str();
  app.add_option("--only", rc.only, "Run only these acceptance checks (verify)");

  const std::map<std::string, std::function<Output(const RunConfig&)>> commands{
      {"modes", cmd_modes}, {"dos", cmd_dos},   {"fc", cmd_fc},       {"kernel", cmd_kernel},
      {"cool", cmd_cool},   {"ld", cmd_ld},     {"verify", cmd_verify}};
  const std::map<std::string, std::string> help{
      {"modes", "Equilibrium positions, mode frequencies and eigenvectors"},
      {"dos", "Exact shell census D(E) and smooth g(E) dE"},
      {"fc", "Brute-force shell coupling Q(E, E') beside the classical kernel"},
      {"kernel", "Classical kernel curves f and g*Q for several N"},
      {"cool", "Ergodic rate equation with the Fokker-Planck solution alongside"},
      {"ld", "Lamb-Dicke per-mode rate equations"},
      {"verify", "Acceptance checks, one pass/fail line each"}};
  for (const auto& [name, text] : help) app.add_subcommand(name, text);

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error code=" << error_code_name(ErrorCode::InvalidArgument)
        << " message=" << one_line(e.what()) << "\n";
    return 2;
  }
  for (const auto* sub : app.get_subcommands()) rc.subcommand = sub->get_name();

  try {
    require(rc.n >= 1, "--n must be >= 1");
    require(rc.de > 0.0, "--de must be > 0");
    require(rc.m_driven >= 1 && rc.m_driven <= rc.n, "--m-driven must lie in [1, n]");
    require(rc.record_every >= 1, "--record-every must be >= 1");
    const Output o = commands.at(rc.subcommand)(rc);
    emit(rc, o, out);
    return o.status;
  } catch (const Error& e) {
    err << "error code=" << error_code_name(e.code()) << " message=" << one_line(e.what()) << "\n";
    return e.code() == ErrorCode::InvalidArgument ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error code=E_INTERNAL message=" << one_line(e.what()) << "\n";
    return 1;
  }
}

}  // namespace crystalcool::cli
