#include "sqmag/error.hpp"

namespace sqmag {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::DivergentInductance: return "DivergentInductance";
    case ErrorCode::PoleProximity: return "PoleProximity";
    case ErrorCode::FieldAboveCritical: return "FieldAboveCritical";
    case ErrorCode::NoRationalWithinBound: return "NoRationalWithinBound";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::NoCandidate: return "NoCandidate";
    case ErrorCode::ZeroResponsivity: return "ZeroResponsivity";
    case ErrorCode::InsufficientSpan: return "InsufficientSpan";
    case ErrorCode::SlopeMismatch: return "SlopeMismatch";
    case ErrorCode::Internal: return "InternalError";
  }
  return "UnknownError";
}

}  // namespace sqmag
