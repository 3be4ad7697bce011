#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lightshift {

/// Machine-readable failure category. The CLI maps these onto exit codes.
enum class ErrorCode {
  InvalidInput,
  Pole,
  Regime,
  IntegrationFailure,
  Extraction,
  Fit,
  Convergence,
  Config,
  Usage,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::InvalidInput: return "invalid-input";
  case ErrorCode::Pole: return "pole";
  case ErrorCode::Regime: return "regime";
  case ErrorCode::IntegrationFailure: return "integration-failure";
  case ErrorCode::Extraction: return "extraction";
  case ErrorCode::Fit: return "fit";
  case ErrorCode::Convergence: return "convergence";
  case ErrorCode::Config: return "config";
  case ErrorCode::Usage: return "usage";
  }
  return "unknown";
}

/// Domain errors whose code is a usage/config problem rather than physics.
constexpr bool is_usage_error(ErrorCode code) {
  return code == ErrorCode::Config || code == ErrorCode::Usage;
}

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &message, std::string detail = {})
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }

  /// Short tag naming the offending quantity, e.g. the vanishing denominator
  /// of a pole error. May be empty.
  const std::string &detail() const noexcept { return detail_; }

private:
  ErrorCode code_;
  std::string detail_;
};

} // namespace lightshift
