#pragma once

#include <stdexcept>
#include <string>

namespace sqc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix shapes or (n, m) pairs outside the supported family.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Gram matrix of a spanning set is numerically singular.
class DegenerateBasisError : public Error {
 public:
  using Error::Error;
};

/// A quadrature request cannot be exact for the declared integrand degree.
class ExactnessError : public Error {
 public:
  using Error::Error;
};

/// The field does not make the cubic part of the integrand negative.
class NotACounterexampleError : public Error {
 public:
  using Error::Error;
};

/// Violated precondition on a scalar argument (epsilon, tolerances, counts).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace sqc
