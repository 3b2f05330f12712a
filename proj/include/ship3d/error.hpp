#pragma once

#include <stdexcept>
#include <string>

namespace ship3d {

enum class ErrorCode {
  kMalformedHeader,
  kUnsupportedFormat,
  kMissingProperty,
  kTruncatedData,
  kInvariantViolation,
  kIo,
  kUnsupportedDepth,
  kDimensionMismatch,
  kEmptyMask,
  kEmptyInput,
  kDegenerateGeometry,
  kInsufficientPoints,
  kRankDeficient,
  kPointAtInfinity,
  kOutOfRange,
  kInvalidArgument,
};

const char* to_string(ErrorCode code);

// All library failures are reported through this type; `code()` lets callers
// branch without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ship3d
