#pragma once

#include <stdexcept>
#include <string>

namespace cvxnav {

enum class ErrorKind {
  SingularParametrization,
  DegenerateChart,
  NonConvex,
  FrameDegenerate,
  InsideBody,
  ConvexityViolation,
  ChartSingularity,
  StepUnderflow,
  TrackingDiverged,
  NotInOmega,
  OracleFailure,
  Construction,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

// Numerical failures. The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Malformed scene configuration or CLI input. Exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cvxnav
