#pragma once

#include <stdexcept>
#include <string>

namespace nscheps {

enum class ErrorKind {
  parameter,
  range,
  shape,
  domain,
  resolution,
  compatibility,
  coefficient,
  config,
  io,
  format,
  solver,
};

const char* to_string(ErrorKind kind);

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// A time step that did not converge. Carries the last residual so callers
/// can decide whether to retry with a smaller step.
class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, double residual)
      : Error(ErrorKind::solver, what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace nscheps
