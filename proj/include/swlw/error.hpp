#pragma once

#include <stdexcept>
#include <string>

namespace swlw {

/// Base class for all errors raised by the library. `kind()` is a short,
/// stable, machine-readable class name used by the command line tool.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

/// Invalid configuration or arguments (schema or physical validation).
class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config"; }
};

/// A numerical procedure failed to converge or hit a singular step.
class NumericalError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "numerical"; }
};

/// Non-finite values appeared in the solution.
class BlowUpError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "blow-up"; }
};

/// Misuse of a stateful object (wrong step order, mismatched sizes).
class StateError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "state"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "io"; }
};

}  // namespace swlw
