#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace iriscs {

enum class ErrorCode {
  FileNotFound,
  UnsupportedFormat,
  ImageTooSmall,
  IoError,
  DimensionMismatch,
  InvalidFraction,
  InvalidConfig,
  InconsistentMeasurements,
  DegenerateContour,
  LocalizationFailed,
  VisibilityRejected,
  LatticeMismatch,
  EmptyJointMask,
  OutOfRange,
  ManifestError,
  EnrollmentFailed,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace iriscs
