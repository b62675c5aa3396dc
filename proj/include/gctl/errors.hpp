#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gctl {

// Caller broke a documented precondition (dimension mismatch, bad index, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A matrix that must be invertible / SPD was not.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Plant or controller produced a non-finite value.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t step, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace gctl
