#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eqlearn {

enum class ErrorCode {
  ConstantResponse,
  SingularDesign,
  DegenerateDof,
  NonFiniteInput,
  DegeneratePrior,
  NonPositiveXi,
  EmptyActiveSet,
  NonFiniteState,
  InvalidArgument,
  MalformedData,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ConstantResponse: return "ConstantResponse";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::DegenerateDof: return "DegenerateDof";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::DegeneratePrior: return "DegeneratePrior";
    case ErrorCode::NonPositiveXi: return "NonPositiveXi";
    case ErrorCode::EmptyActiveSet: return "EmptyActiveSet";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MalformedData: return "MalformedData";
  }
  return "Unknown";
}

/// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace eqlearn
