#pragma once

#include <stdexcept>
#include <string>

namespace nterm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violates an operation's precondition (index 0, p <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A series the requested quantity depends on does not converge.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// A certified enclosure could not be tightened to the requested tolerance.
class ToleranceUnreachable : public Error {
 public:
  using Error::Error;
};

/// Convergence or boundedness cannot be decided from what a family provides.
class UndecidableError : public Error {
 public:
  using Error::Error;
};

/// A value cannot be represented as a finite double.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// An index scan hit its hard cap before certifying a result.
///
/// Carries the best value seen, which is a valid lower bound for the
/// quantity that was being searched.
class ScanBudgetExceeded : public Error {
 public:
  ScanBudgetExceeded(const std::string& what, double partial_lower_bound,
                     long long last_index)
      : Error(what), partial_lower_bound_(partial_lower_bound),
        last_index_(last_index) {}

  double partial_lower_bound() const noexcept { return partial_lower_bound_; }
  long long last_index() const noexcept { return last_index_; }

 private:
  double partial_lower_bound_;
  long long last_index_;
};

}  // namespace nterm
