#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mdd {

enum class ErrorCode {
  ZeroMass,
  CapExceeded,
  DimensionMismatch,
  NotStochastic,
  ZeroContext,
  SupportViolation,
  BoundViolated,
  DegenerateEntropy,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying one of the library's error categories.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ZeroMass: return "ZeroMass";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotStochastic: return "NotStochastic";
    case ErrorCode::ZeroContext: return "ZeroContext";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::BoundViolated: return "BoundViolated";
    case ErrorCode::DegenerateEntropy: return "DegenerateEntropy";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace mdd
