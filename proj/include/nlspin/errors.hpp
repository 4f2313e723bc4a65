#pragma once

#include <stdexcept>
#include <string>

namespace nlspin {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input violated a documented precondition or invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A computation has no finite answer (zero coupling, no photons, no root).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nlspin
