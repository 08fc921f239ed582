#pragma once

#include <stdexcept>
#include <string>

namespace lpp {

// Base of every error raised by the library. The CLI maps the subclasses
// onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A vertex or column outside the domain an operation was asked to cover.
class DomainError : public Error {
 public:
  using Error::Error;
};

// u is not coordinate-wise below v.
class OrderError : public Error {
 public:
  using Error::Error;
};

// Requested storage exceeds the configured memory budget.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Invalid or degenerate parameters (geometry, configuration values).
class ParameterError : public Error {
 public:
  using Error::Error;
};

class NoPathError : public Error {
 public:
  using Error::Error;
};

// Too few usable rows or samples for an estimator.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace lpp
