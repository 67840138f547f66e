#pragma once

// The acceptance suite. Each check pins its own tolerances and regimes; the
// acceptance test binary and the `verify` subcommand both run these.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace crystalcool {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 20061;
};

CheckResult check_mode_frequencies(const VerifyOptions& options);
CheckResult check_state_census(const VerifyOptions& options);
CheckResult check_fc_moments(const VerifyOptions& options);
CheckResult check_kernel_contracts(const VerifyOptions& options);
CheckResult check_quantum_classical(const VerifyOptions& options);
CheckResult check_fokker_planck(const VerifyOptions& options);
CheckResult check_doppler_limit(const VerifyOptions& options);
CheckResult check_lamb_dicke(const VerifyOptions& options);
CheckResult check_m_scaling(const VerifyOptions& options);

struct NamedCheck {
  int id;
  std::string name;
  std::function<CheckResult(const VerifyOptions&)> run;
};
const std::vector<NamedCheck>& acceptance_checks();

// Runs one check, timing it and turning exceptions into failures.
CheckResult run_check(const NamedCheck& check, const VerifyOptions& options);

// "PASS 1 mode-frequencies (0.01 s): detail"
std::string format_result(const CheckResult& result);

}  // namespace crystalcool
