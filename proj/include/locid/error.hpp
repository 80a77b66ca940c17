#pragma once

#include <stdexcept>
#include <string>

namespace locid {

// Base for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sizes or measures of operands do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// An argument lies outside the domain where an operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A numerical routine failed (non-finite values, non-convergence).
class NumericError : public Error {
 public:
  using Error::Error;
};

// Iterative solver ran out of iterations.
class ConvergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Invalid experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace locid
