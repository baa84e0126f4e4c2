#pragma once

#include <stdexcept>
#include <string>

namespace robmse {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical routine could not reach its tolerance.
class ToleranceError : public std::runtime_error {
 public:
  ToleranceError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved_error() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// A lattice or FFT request exceeds the memory budget.
class SizeError : public std::length_error {
 public:
  SizeError(const std::string& what, double suggested_step)
      : std::length_error(what), suggested_step_(suggested_step) {}
  /// Coarsest step that would fit the budget.
  double suggested_step() const noexcept { return suggested_step_; }

 private:
  double suggested_step_;
};

}  // namespace robmse
