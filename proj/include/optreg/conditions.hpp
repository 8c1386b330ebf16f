#pragma once

#include "optreg/scenario.hpp"

namespace optreg {

/// Closed-form value of the strong-law condition integral
///
///   ∫_{]0,∞]} d⟨N^c⟩_s/(1+A_s)² + ∫∫ |1+A_s|^{-q}|x|^q dν^r_s
///                                + ∫∫ |1+A_{s+}|^{-q}|x|^q dν^g_{s+}
///
/// for N = f∘M and A = F in the analytic family: risk and nonlinear
/// (f ≡ 1, A_t = t), and gaussian_deterministic_f (f_s = (1+s)^p, Wiener
/// noise only). Returns +inf when the integral diverges. Throws DomainError
/// for q outside [1, 2] and UnsupportedScenarioError for other scenarios.
double slln_condition_eval(const ScenarioConfig& config, double q = 2.0);

/// Whether F_∞ = f²∘a_∞ is infinite, for the same analytic family.
bool design_diverges(const ScenarioConfig& config);

}  // namespace optreg
