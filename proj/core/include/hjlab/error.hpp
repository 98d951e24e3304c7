#pragma once

#include <stdexcept>
#include <string>

namespace hjlab {

enum class ErrorCode {
  InvalidArgument,
  UnknownName,
  NonFinite,
  SingularMatrix,
  IndexOutOfRange,
  EmptyBox,
  NotFound,
  OutsideDomain,
  HorizonExceeded,
  NoConvergence,
  DegenerateParam,
  Unsupported,
  ResolutionTooCoarse,
  EmptyFiber,
  DomainViolation,
  CFLViolation,
  UnstableDetected,
  NotConvex,
  NormalizationFailed,
  ShockSolverFailed,
  EmptyViolationInterval,
  WitnessGapNonpositive,
  AxisMismatch,
  ParseError,
  IoError,
};

const char* to_string(ErrorCode code);

class HjError : public std::runtime_error {
 public:
  HjError(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace hjlab
