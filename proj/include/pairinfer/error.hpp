#pragma once

#include <stdexcept>
#include <string>

namespace pairinfer {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Negative time, negative rate, zero denominator and similar argument faults.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed dataset, manifest or command-line argument.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Unknown parameter names, bad grid definitions.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The data cannot be produced by the model at any admissible parameter.
class InfeasibleDataError : public Error {
 public:
  using Error::Error;
};

/// Bracketed root search found no sign change.
class NoRootError : public Error {
 public:
  using Error::Error;
};

/// Finite-difference stencil kept hitting the -inf sentinel.
class SingularStencilError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pairinfer
