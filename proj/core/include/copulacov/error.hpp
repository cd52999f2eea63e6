#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace copulacov {

enum class ErrorCode {
  ParameterOutOfRange,
  DomainError,
  TiesPresent,
  MarginKindMismatch,
  KindMismatch,
  DerivativeUndefined,
  QuadratureFailure,
  ModelMismatch,
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Library-wide exception. Every failure carries a machine-checkable code.
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
    case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::TiesPresent: return "TiesPresent";
    case ErrorCode::MarginKindMismatch: return "MarginKindMismatch";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::DerivativeUndefined: return "DerivativeUndefined";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::ModelMismatch: return "ModelMismatch";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace copulacov
