#pragma once

#include <stdexcept>
#include <string>

namespace fockop {

/// Bad data handed to the library: malformed matrices, schema violations,
/// precondition failures a caller can fix. CLI maps these to exit code 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Shape mismatch (non-square A, b of wrong length, empty matrices).
class DimensionError : public InputError {
 public:
  using InputError::InputError;
};

/// A computation would overflow the double range (kernel exponent guard).
class RangeError : public InputError {
 public:
  using InputError::InputError;
};

/// A requested object is too large to materialize (basis size cap).
class ResourceError : public InputError {
 public:
  using InputError::InputError;
};

/// The operator at hand is unbounded and the requested quantity does not exist.
class UnboundedError : public InputError {
 public:
  using InputError::InputError;
};

/// Two independent numerical routes disagreed beyond tolerance. Not a user
/// error: it means the implementation can no longer vouch for its own output.
/// CLI maps these to exit code 3.
class CrossCheckError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fockop
