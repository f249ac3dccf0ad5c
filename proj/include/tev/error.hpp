#ifndef TEV_ERROR_HPP
#define TEV_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace tev {

enum class ErrorCode {
  GapOrOverlap,
  DiscontinuousJunction,
  NonPositive,
  BadParams,
  StepFailure,
  MismatchedPoint,
  ContourThroughZero,
  NonIntegerWinding,
  QuadratureFailure,
  NonPositiveJost,
  GridTooShort,
  AsymmetricJump,
  FitDegenerate,
  ZeroDenominator,
  ResidueNotPositiveReal,
  SupportLeak,
  SingularSystem,
  Unsupported,
  Ambiguous,
  GammaZero,
  QZeroOutOfRange,
  CrossCheckFailed,
  IoError,
  ParseError,
};

inline std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::GapOrOverlap: return "GapOrOverlap";
    case ErrorCode::DiscontinuousJunction: return "DiscontinuousJunction";
    case ErrorCode::NonPositive: return "NonPositive";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::MismatchedPoint: return "MismatchedPoint";
    case ErrorCode::ContourThroughZero: return "ContourThroughZero";
    case ErrorCode::NonIntegerWinding: return "NonIntegerWinding";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::NonPositiveJost: return "NonPositiveJost";
    case ErrorCode::GridTooShort: return "GridTooShort";
    case ErrorCode::AsymmetricJump: return "AsymmetricJump";
    case ErrorCode::FitDegenerate: return "FitDegenerate";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::ResidueNotPositiveReal: return "ResidueNotPositiveReal";
    case ErrorCode::SupportLeak: return "SupportLeak";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::Ambiguous: return "Ambiguous";
    case ErrorCode::GammaZero: return "GammaZero";
    case ErrorCode::QZeroOutOfRange: return "QZeroOutOfRange";
    case ErrorCode::CrossCheckFailed: return "CrossCheckFailed";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying the
/// pipeline stage that raised it and a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string stage, const std::string& message)
      : std::runtime_error(message), code_(code), stage_(std::move(stage)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  ErrorCode code_;
  std::string stage_;
};

[[noreturn]] inline void fail(ErrorCode code, std::string stage, const std::string& message) {
  throw Error(code, std::move(stage), message);
}

}  // namespace tev

#endif  // TEV_ERROR_HPP
