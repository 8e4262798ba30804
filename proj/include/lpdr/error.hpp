#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lpdr {

enum class ErrorCode {
  kDegenerateSimplex,
  kMissingVertex,
  kMissingSimplex,
  kBadDimension,
  kBadExponent,
  kBadSubcomplex,
  kBadCarrier,
  kOutsideDomain,
  kBadDegree,
  kBadEpsilon,
  kNotACounterexample,
  kParseError,
  kSizeLimit,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` distinguishes the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegenerateSimplex: return "DegenerateSimplex";
    case ErrorCode::kMissingVertex: return "MissingVertex";
    case ErrorCode::kMissingSimplex: return "MissingSimplex";
    case ErrorCode::kBadDimension: return "BadDimension";
    case ErrorCode::kBadExponent: return "BadExponent";
    case ErrorCode::kBadSubcomplex: return "BadSubcomplex";
    case ErrorCode::kBadCarrier: return "BadCarrier";
    case ErrorCode::kOutsideDomain: return "OutsideDomain";
    case ErrorCode::kBadDegree: return "BadDegree";
    case ErrorCode::kBadEpsilon: return "BadEpsilon";
    case ErrorCode::kNotACounterexample: return "NotACounterexample";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kSizeLimit: return "SizeLimit";
  }
  return "Unknown";
}

}  // namespace lpdr
