#pragma once

#include <stdexcept>
#include <string>

namespace swat {

// Base class for all errors raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a caller violates an operation's precondition or passes an
// out-of-range parameter.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Raised when a file cannot be read, parsed, or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Raised when training diverges (non-finite loss).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace swat
