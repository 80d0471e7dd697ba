#pragma once

#include <stdexcept>
#include <string>

namespace ldlab {

enum class ErrorCode {
  InvalidSpec,
  ShapeMismatch,
  InvalidParams,
  NonBinaryInput,
  DegenerateConditioning,
  EigenFailure,
  Infeasible,
  MaxIterations,
  Overflow,
  TooLarge,
  ZeroEstimator,
  ConfigParse,
  UnknownField,
  OutputUnwritable,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::NonBinaryInput: return "NonBinaryInput";
    case ErrorCode::DegenerateConditioning: return "DegenerateConditioning";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ZeroEstimator: return "ZeroEstimator";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::UnknownField: return "UnknownField";
    case ErrorCode::OutputUnwritable: return "OutputUnwritable";
  }
  return "Unknown";
}

/// Guards that stop a computation because a numeric limit was reached
/// (as opposed to bad input). The CLI maps these to exit code 3.
inline bool is_numeric_guard(ErrorCode code) {
  return code == ErrorCode::TooLarge || code == ErrorCode::Overflow ||
         code == ErrorCode::Infeasible || code == ErrorCode::MaxIterations ||
         code == ErrorCode::EigenFailure ||
         code == ErrorCode::DegenerateConditioning;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace ldlab
