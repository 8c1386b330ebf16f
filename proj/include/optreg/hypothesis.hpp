#pragma once

// Sequential test of H0: X = f∘a·θ + M (|θ| >= δ) against H1: X = M, with
// simultaneous estimation of θ.

#include <optional>
#include <string>

#include "optreg/estimators.hpp"

namespace optreg {

enum class Decision { accept_h0, accept_h1 };

std::string to_string(Decision d);

/// 4 δ⁻² ε⁻¹ 𝐄ξ, the level that keeps both error probabilities below ε.
/// Throws DomainError unless all inputs are positive.
double required_H(double delta, double epsilon, double xi_mean);

struct TestConfig {
  double delta = 1.0;
  double epsilon = 0.05;
  double xi_mean = 1.0;
  double H = 0.0;

  /// H = required_H(delta, epsilon, xi_mean).
  static TestConfig with_required_H(double delta, double epsilon, double xi_mean);
  void validate() const;
};

/// φ_H(X): the sequential statistic applied to X (nullopt if F never reaches H).
std::optional<double> phi_H(const LadlagPath& X, const BilinearIntegrand& f,
                            const Integrator& a, double H,
                            EstimatorForm form = EstimatorForm::corrected);

/// accept_h0 iff |φ| >= δ/2; the tie goes to H0.
Decision decide(double phi, double delta);

struct TestOutcome {
  double phi = 0.0;
  Decision decision = Decision::accept_h1;
  SequentialResult sequential;
};

/// Runs φ_H and the decision; nullopt when F never reaches H.
std::optional<TestOutcome> run_test(const LadlagPath& X, const BilinearIntegrand& f,
                                    const Integrator& a, const TestConfig& config,
                                    EstimatorForm form = EstimatorForm::corrected);

}  // namespace optreg
