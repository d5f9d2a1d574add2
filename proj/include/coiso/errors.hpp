#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace coiso {

enum class ErrorKind {
  DimensionMismatch,
  NonFinite,
  NonConvergence,
  SingularJacobian,
  RankDeficiency,
  SamplerFailure,
  StepSizeUnderflow,
  InvalidArgument,
  InvalidInitialData,
  ToleranceViolation,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a machine-readable kind; the CLI
// maps kinds onto exit codes and the JSON error report.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by the trajectory driver. `index` is the step being computed when the
// failure occurred (0 means the initial data was rejected).
class StepFailed : public Error {
 public:
  StepFailed(std::size_t index, ErrorKind cause, const std::string& what)
      : Error(cause, what), index_(index) {}

  std::size_t index() const noexcept { return index_; }
  ErrorKind cause() const noexcept { return kind(); }

 private:
  std::size_t index_;
};

}  // namespace coiso
