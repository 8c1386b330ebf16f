#pragma once

#include <stdexcept>
#include <string>

namespace optreg {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An integrand could not be evaluated at an event time.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// The design process F vanishes where the estimator needs to divide by it.
class DegenerateDesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Analytic evaluation requested for a scenario outside the supported family.
class UnsupportedScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace optreg
