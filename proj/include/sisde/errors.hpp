#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sisde {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the declared domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Discriminant alpha^2 + 4 beta < 0: the diffusion quadratic has no real roots.
class RootConditionError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A modelling assumption (nonnegative rates, declared constants) does not hold.
class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

/// Sum of one-step jump probabilities exceeds one, or an explicit scheme is unstable.
class StepSizeError : public Error {
 public:
  using Error::Error;
};

/// Covariance entries do not admit a real symmetric square root.
class DegenerateMatrixError : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, std::size_t step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace sisde
