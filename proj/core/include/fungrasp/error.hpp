#pragma once

#include <stdexcept>
#include <string>

namespace fungrasp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (JSON, OBJ, JSON-lines). Messages carry a position.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Input that parsed but violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf encountered, or a numerical procedure that cannot proceed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace fungrasp
