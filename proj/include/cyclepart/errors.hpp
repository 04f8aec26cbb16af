#pragma once

#include <stdexcept>
#include <string>

namespace cyclepart {

// Invalid input: violated precondition, malformed shape, wrong regime.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Request exceeds a configured size cap (enumeration, brute force, chain size).
class CapError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Series that does not converge for the requested arguments.
class DivergenceError : public DomainError {
 public:
  using DomainError::DomainError;
};

// A tolerance could not be certified within the term budget.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cyclepart
