#include "nhad/error.hpp"

namespace nhad {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonPositiveWidth: return "NonPositiveWidth";
    case ErrorKind::SingularFrame: return "SingularFrame";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::ConsistencyViolation: return "ConsistencyViolation";
    case ErrorKind::SynthesisSingularity: return "SynthesisSingularity";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::OrderViolation: return "OrderViolation";
    case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::ZeroInitialState: return "ZeroInitialState";
    case ErrorKind::ZeroInitialProjection: return "ZeroInitialProjection";
    case ErrorKind::GridMismatch: return "GridMismatch";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace nhad
