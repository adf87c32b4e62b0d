#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hutchfrac {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A word enumeration or cloud would exceed the configured budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// A map sent a point outside the declared domain box.
class DomainEscape : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hutchfrac
