#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stablewalk {

enum class ErrorCode {
  kInvalidParameter,
  kFamilyMismatch,
  kGridNotIncreasing,
  kDimensionMismatch,
  kInsufficientPath,
  kPackingOverflow,
  kNonTransientLaw,
  kToleranceUnreachable,
  kBoxTooSmall,
  kDisplacementOutOfRange,
  kSingularSystem,
  kIllConditioned,
  kEquilibriumOutOfRange,
  kOutOfRegime,
  kNonpositiveValue,
  kDegenerateSample,
  kInsufficientReplicas,
  kLengthMismatch,
  kStopTimeExceedsHorizon,
  kConfigInvalid,
  kRegimeViolation,
  kUnsupportedLaw,
  kIo,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI and the verification battery can map it to an exit status.
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
    case ErrorCode::kInvalidParameter: return "invalid-parameter";
    case ErrorCode::kFamilyMismatch: return "family-mismatch";
    case ErrorCode::kGridNotIncreasing: return "grid-not-increasing";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kInsufficientPath: return "insufficient-path";
    case ErrorCode::kPackingOverflow: return "packing-overflow";
    case ErrorCode::kNonTransientLaw: return "non-transient-law";
    case ErrorCode::kToleranceUnreachable: return "tolerance-unreachable";
    case ErrorCode::kBoxTooSmall: return "box-too-small";
    case ErrorCode::kDisplacementOutOfRange: return "displacement-out-of-range";
    case ErrorCode::kSingularSystem: return "singular-or-indefinite-system";
    case ErrorCode::kIllConditioned: return "ill-conditioned-system";
    case ErrorCode::kEquilibriumOutOfRange: return "equilibrium-out-of-range";
    case ErrorCode::kOutOfRegime: return "out-of-regime";
    case ErrorCode::kNonpositiveValue: return "nonpositive-value";
    case ErrorCode::kDegenerateSample: return "degenerate-sample";
    case ErrorCode::kInsufficientReplicas: return "insufficient-replicas";
    case ErrorCode::kLengthMismatch: return "length-mismatch";
    case ErrorCode::kStopTimeExceedsHorizon: return "stop-time-exceeds-horizon";
    case ErrorCode::kConfigInvalid: return "config-invalid";
    case ErrorCode::kRegimeViolation: return "regime-violation";
    case ErrorCode::kUnsupportedLaw: return "unsupported-law";
    case ErrorCode::kIo: return "io-error";
  }
  return "unknown";
}

}  // namespace stablewalk
