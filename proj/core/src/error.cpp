#include "hjlab/error.hpp"

namespace hjlab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptyBox: return "EmptyBox";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::HorizonExceeded: return "HorizonExceeded";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateParam: return "DegenerateParam";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorCode::EmptyFiber: return "EmptyFiber";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::CFLViolation: return "CFLViolation";
    case ErrorCode::UnstableDetected: return "UnstableDetected";
    case ErrorCode::NotConvex: return "NotConvex";
    case ErrorCode::NormalizationFailed: return "NormalizationFailed";
    case ErrorCode::ShockSolverFailed: return "ShockSolverFailed";
    case ErrorCode::EmptyViolationInterval: return "EmptyViolationInterval";
    case ErrorCode::WitnessGapNonpositive: return "WitnessGapNonpositive";
    case ErrorCode::AxisMismatch: return "AxisMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

HjError::HjError(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw HjError(code, what); }

}  // namespace hjlab
