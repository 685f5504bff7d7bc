#include "obstacle/errors.hpp"

namespace obstacle {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EvaluatorFailure: return "EvaluatorFailure";
    case ErrorCode::ValidationFailure: return "ValidationFailure";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::CflViolation: return "CflViolation";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::InnerDivergence: return "InnerDivergence";
    case ErrorCode::MonotonicityViolation: return "MonotonicityViolation";
    case ErrorCode::LcpStall: return "LcpStall";
    case ErrorCode::NoContraction: return "NoContraction";
    case ErrorCode::MissingDerivative: return "MissingDerivative";
    case ErrorCode::RegressionSingular: return "RegressionSingular";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) {
  return code == ErrorCode::EvaluatorFailure || code == ErrorCode::ValidationFailure ||
         code == ErrorCode::ConfigError || code == ErrorCode::MissingDerivative;
}

}  // namespace obstacle
