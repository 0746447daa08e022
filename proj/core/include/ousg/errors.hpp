#pragma once

#include <stdexcept>
#include <string>

namespace ousg {

enum class ErrorCode {
  NotSymmetric,
  NotPositiveDefinite,
  NotHurwitz,
  NotNormal,
  DegenerateBlock,
  QuadratureFailure,
  CholeskyFailure,
  DimensionMismatch,
  InvalidTime,
  ZeroVector,
  NoRoot,
  UnknownLemma,
  BudgetExceeded,
  GridTooCoarse,
  NonTermination,
  AlphaTooSmall,
  ConfigParse,
};

const char* error_code_name(ErrorCode code);

/// All library failures are reported through this exception type; `code()`
/// lets callers (notably the CLI) map failures to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NotHurwitz: return "NotHurwitz";
    case ErrorCode::NotNormal: return "NotNormal";
    case ErrorCode::DegenerateBlock: return "DegenerateBlock";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::CholeskyFailure: return "CholeskyFailure";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidTime: return "InvalidTime";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::UnknownLemma: return "UnknownLemma";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::NonTermination: return "NonTermination";
    case ErrorCode::AlphaTooSmall: return "AlphaTooSmall";
    case ErrorCode::ConfigParse: return "ConfigParse";
  }
  return "UnknownError";
}

}  // namespace ousg
