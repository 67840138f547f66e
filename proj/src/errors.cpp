#include "crystalcool/errors.hpp"

namespace crystalcool {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "E_INVALID_ARGUMENT";
    case ErrorCode::NonConvergence: return "E_NON_CONVERGENCE";
    case ErrorCode::NotEquilibrium: return "E_NOT_EQUILIBRIUM";
    case ErrorCode::NotCrystallized: return "E_NOT_CRYSTALLIZED";
    case ErrorCode::BudgetExceeded: return "E_BUDGET";
    case ErrorCode::TruncationInsufficient: return "E_TRUNCATION";
    case ErrorCode::NoAxialProjection: return "E_NO_AXIAL_PROJECTION";
    case ErrorCode::NoSteadyState: return "E_NO_STEADY_STATE";
    case ErrorCode::StepTooLarge: return "E_STEP_TOO_LARGE";
    case ErrorCode::NegativeDensity: return "E_NEGATIVE_DENSITY";
    case ErrorCode::DimensionMismatch: return "E_DIMENSION_MISMATCH";
    case ErrorCode::Io: return "E_IO";
  }
  return "E_UNKNOWN";
}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace crystalcool
