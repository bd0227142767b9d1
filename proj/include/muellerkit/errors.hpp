#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace muellerkit {

enum class ErrorCode {
  M00NonPositive,
  DOutOfRange,
  NonFinite,
  NotHermitian,
  NoConvergence,
  DimensionMismatch,
  MaskedInput,
  DegenerateNoReconstruction,
  BadMagic,
  UnsupportedVersion,
  BadHeader,
  TruncatedFile,
  TrailingData,
  DimOverflow,
  MissingPlane,
  BadPath,
  TooFewSpecimens,
  InvalidFraction,
  EmptyInput,
  InvalidArgument,
  NotContiguous,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::M00NonPositive: return "M00NonPositive";
    case ErrorCode::DOutOfRange: return "DOutOfRange";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MaskedInput: return "MaskedInput";
    case ErrorCode::DegenerateNoReconstruction: return "DegenerateNoReconstruction";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::TrailingData: return "TrailingData";
    case ErrorCode::DimOverflow: return "DimOverflow";
    case ErrorCode::MissingPlane: return "MissingPlane";
    case ErrorCode::BadPath: return "BadPath";
    case ErrorCode::TooFewSpecimens: return "TooFewSpecimens";
    case ErrorCode::InvalidFraction: return "InvalidFraction";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotContiguous: return "NotContiguous";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace muellerkit
