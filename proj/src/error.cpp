#include "acu/error.hpp"

namespace acu {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingJoint: return "MissingJoint";
    case ErrorCode::RecursionLimitExceeded: return "RecursionLimitExceeded";
    case ErrorCode::ZeroNormalization: return "ZeroNormalization";
    case ErrorCode::InvalidFov: return "InvalidFov";
    case ErrorCode::NonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::NoContact: return "NoContact";
    case ErrorCode::InsufficientCycles: return "InsufficientCycles";
    case ErrorCode::NoTwistDetected: return "NoTwistDetected";
    case ErrorCode::InsufficientRotations: return "InsufficientRotations";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
  }
  return "Unknown";
}

}  // namespace acu
