#include "iriscs/error.hpp"

namespace iriscs {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidFraction: return "InvalidFraction";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InconsistentMeasurements: return "InconsistentMeasurements";
    case ErrorCode::DegenerateContour: return "DegenerateContour";
    case ErrorCode::LocalizationFailed: return "LocalizationFailed";
    case ErrorCode::VisibilityRejected: return "VisibilityRejected";
    case ErrorCode::LatticeMismatch: return "LatticeMismatch";
    case ErrorCode::EmptyJointMask: return "EmptyJointMask";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::ManifestError: return "ManifestError";
    case ErrorCode::EnrollmentFailed: return "EnrollmentFailed";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace iriscs
