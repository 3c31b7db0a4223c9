#pragma once

#include <stdexcept>
#include <string>

namespace curecg {

// Argument shapes disagree (covariate length vs beta length, gradient size, ...).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A computation produced a non-finite value it cannot recover from.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File parsing or writing failed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace curecg
