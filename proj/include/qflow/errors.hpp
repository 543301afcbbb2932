#pragma once

#include <stdexcept>
#include <string>

namespace qflow {

/// Base of every error the library throws. The CLI maps the subclasses onto
/// process exit codes (config = 1, numerical = 2, I/O = 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: bad grid sizes, unknown model kind, malformed config.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Any failure of the numerics proper.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A square-root argument went negative beyond round-off.
class RadicandError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A linear solve could not be carried out (singular mode, singular
/// correction block, Krylov stagnation).
class SolverError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace qflow
