#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geoquad {

enum class ErrorKind {
  NotSkewSymmetric,
  NotARotation,
  DegenerateProjection,
  SingularInput,
  SingularMixing,
  InvalidParameter,
  ThrustSingularity,
  ThrustVectorSingularity,
  OutOfWindow,
  InfeasibleInputs,
  FitFailed,
  NonFiniteState,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Library-wide exception. The kind is machine-checkable; the message is for
/// humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace geoquad
