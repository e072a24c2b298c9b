#pragma once

#include <stdexcept>
#include <string>

namespace expsamp {

/// Argument outside the mathematical domain (nonpositive coordinate, n = 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Inconsistent or insufficient configuration (truncation, probe sizes, shapes).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A mathematical precondition the caller is responsible for does not hold.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Requested derivative order is not implemented.
class UnsupportedOrderError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace expsamp
