#pragma once

#include <stdexcept>
#include <string>

namespace obstacle {

/// Failure classes surfaced to callers. The CLI maps each class onto an exit
/// code: validation-type failures exit 2, numerical failures exit 3.
enum class ErrorCode {
  EvaluatorFailure,
  ValidationFailure,
  ConfigError,
  CflViolation,
  GridTooCoarse,
  InnerDivergence,
  MonotonicityViolation,
  LcpStall,
  NoContraction,
  MissingDerivative,
  RegressionSingular,
};

const char* to_string(ErrorCode code);

/// True for failures caused by bad input rather than by a numerical method.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace obstacle
