#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace defosc {

// Argument outside the mathematical domain of an operation (beta <= 0, n = 0 for f(n), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Level index beyond what a custom table or truncated basis provides.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// The requested operation is not defined for the given bath model.
class UnsupportedModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A model whose steady state is not determined (zero denominators, rank loss).
class DegenerateModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Time integration went non-finite or drifted beyond the hard trace cap.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, std::size_t step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace defosc
