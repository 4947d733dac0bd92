#pragma once

#include <stdexcept>
#include <string>

namespace kinlr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Periodic Poisson problem has a right-hand side with non-zero mean.
class SolvabilityError : public Error {
 public:
  using Error::Error;
};

/// Invalid problem, grid, policy or run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Time step violates the stability guard of the integrator.
class StepSizeError : public Error {
 public:
  using Error::Error;
};

/// A dense object would exceed the configured size cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or a failed dense factorization.
class NumericError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

/// File could not be read/written or has malformed content.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace kinlr
