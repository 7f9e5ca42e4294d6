#pragma once

#include <stdexcept>
#include <string>

namespace tikreg {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

class SingularOperatorError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition on parameters was violated.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NoTransitionError : public Error {
 public:
  using Error::Error;
};

/// A configured computational cap (terms, samples) was exceeded.
class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, double achieved_tail_bound)
      : Error(what), achieved_tail_bound_(achieved_tail_bound) {}
  double achieved_tail_bound() const noexcept { return achieved_tail_bound_; }

 private:
  double achieved_tail_bound_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tikreg
