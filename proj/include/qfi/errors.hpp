#pragma once

#include <stdexcept>
#include <string>

namespace qfi {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented invariant (bad state, bad spec file, domain).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A computation could not be carried out reliably.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Eigenvalue crossing or degenerate cluster where derivatives are undefined.
class DegeneracyError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace qfi
