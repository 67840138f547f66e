#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crystalcool {

enum class ErrorCode {
  InvalidArgument,
  NonConvergence,
  NotEquilibrium,
  NotCrystallized,
  BudgetExceeded,
  TruncationInsufficient,
  NoAxialProjection,
  NoSteadyState,
  StepTooLarge,
  NegativeDensity,
  DimensionMismatch,
  Io,
};

// Stable identifier used in machine-readable diagnostics (e.g. "E_BUDGET").
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace crystalcool
