#pragma once

#include <stdexcept>
#include <string>

namespace dualverify {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector or matrix dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Interval with lower > upper, or a non-finite endpoint.
class InvalidIntervalError : public Error {
 public:
  using Error::Error;
};

// Activation lacks a property the caller relies on (smoothness, monotone image).
class UnsupportedActivationError : public Error {
 public:
  using Error::Error;
};

// Malformed serialized document.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Caller violated a documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace dualverify
