#pragma once

#include <stdexcept>
#include <string>

namespace nhad {

enum class ErrorKind {
  InvalidArgument,
  NonPositiveWidth,
  SingularFrame,
  DimensionMismatch,
  DegenerateSpectrum,
  IndexOutOfRange,
  ConsistencyViolation,
  SynthesisSingularity,
  GridTooCoarse,
  OrderViolation,
  StepSizeUnderflow,
  ZeroInitialState,
  ZeroInitialProjection,
  GridMismatch,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nhad
