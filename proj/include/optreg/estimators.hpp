#pragma once

// Structural and sequential least-squares estimators of θ in X = f∘a·θ + M.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "optreg/ladlag.hpp"
#include "optreg/optional_integral.hpp"

namespace optreg {

/// How X enters the sequential statistic.
///   corrected: H⁻¹[f∘X_{τ-} + β(f^r ΔX_τ + f^g Δ⁺X_τ)]
///   literal:   H⁻¹[f²∘X_{τ-} + β((f^r)² ΔX_τ + (f^g)² Δ⁺X_τ)]
/// The two agree when f ≡ 1; the literal form is biased for non-constant f
/// because its θ-coefficient is f³∘a rather than F.
enum class EstimatorForm { corrected, literal };

std::string to_string(EstimatorForm form);
EstimatorForm estimator_form_from_string(const std::string& s);

/// θ_t = (f∘X_t) / F_t. Throws DegenerateDesignError when F_t = 0.
double structural_ls(const LadlagPath& X, const BilinearIntegrand& f,
                     const Integrator& a, double t);

/// θ_t at several increasing times from one pass over the path.
std::vector<double> structural_ls(const LadlagPath& X, const BilinearIntegrand& f,
                                  const Integrator& a, std::span<const double> ts);

struct StoppingTime {
  double tau = 0.0;        // +inf when F never reaches H
  double beta = 0.0;       // in [0, 1]
  bool crossed = false;
  double F_at_tau_minus = 0.0;
  double jump_term = 0.0;  // ΔF_τ + Δ⁺F_τ = (f^r)²Δa_τ + (f^g)²Δ⁺a_τ
  std::size_t event = 0;   // skeleton index of τ, or of the end of the segment holding τ
  double fraction = 1.0;   // position of τ inside (event-1, event]
  bool via_jump = false;   // true when a jump of F carries it across H
};

/// τ_H = inf{t : F_t >= H} (right limits included, so a forward jump of F
/// can realise the crossing) and β_H solving F_{τ-} + β·jump = H. Continuous
/// crossings are solved in closed form on the linear segment and get β = 0.
/// Throws DomainError for H <= 0.
StoppingTime stopping_rule(const IncreasingPath& F, double H);

struct SequentialResult {
  double tau_H = 0.0;
  double beta_H = 0.0;
  double theta_hat = 0.0;  // NaN when not crossed
  double F_at_tau_minus = 0.0;
  double H = 0.0;
  bool crossed = false;
  EstimatorForm form = EstimatorForm::corrected;

  bool available() const { return crossed; }
};

/// Sequential LS estimate of θ from the observed path X; the same functional
/// applied to any other path (e.g. the noise M) yields H⁻¹N_{τ_H}.
/// Returns an unavailable result when F stays below H up to the horizon and
/// throws DegenerateDesignError when F vanishes identically.
SequentialResult sequential_ls(const LadlagPath& X, const BilinearIntegrand& f,
                               const Integrator& a, double H,
                               EstimatorForm form = EstimatorForm::corrected);

/// Several levels H from one pass (levels need not be sorted).
std::vector<SequentialResult> sequential_ls(const LadlagPath& X,
                                            const BilinearIntegrand& f,
                                            const Integrator& a,
                                            std::span<const double> levels,
                                            EstimatorForm form = EstimatorForm::corrected);

/// Continuous bijection g with inverse, as used by the nonlinear model
/// X = f∘a·g(θ) + M.
struct GMap {
  std::string name;
  std::function<double(double)> forward;
  std::function<double(double)> inverse;
  std::function<bool(double)> inverse_domain;

  static GMap identity();
  /// g(θ) = √θ on θ >= 0, g⁻¹(x) = x² on the whole line.
  static GMap sqrt_map();
};

struct NonlinearResult {
  double theta_hat = 0.0;  // g⁻¹(ζ̂), NaN if ζ̂ is outside the domain of g⁻¹
  double zeta_hat = 0.0;   // linear sequential estimate of g(θ)
  bool in_domain = false;
  SequentialResult inner;
};

NonlinearResult nonlinear_sequential(const LadlagPath& X, const BilinearIntegrand& f,
                                     const Integrator& a, double H, const GMap& g,
                                     EstimatorForm form = EstimatorForm::corrected);

struct GConditionResult {
  double value = 0.0;  // +inf when divergent
  bool converged = false;
  double cutoff = 0.0;  // L such that the integral runs over [-L, L]
};

/// ∫ (g⁻¹(x))² exp(-x²/2) dx by adaptive Gauss–Kronrod on [-L, L]. L grows in
/// `step` increments until the integrand stays below `tail_threshold` for
/// three consecutive probes on both sides; if that never happens before
/// `max_cutoff` the integral is flagged divergent.
GConditionResult g_condition_check(const std::function<double(double)>& g_inverse,
                                   double step = 0.5, double max_cutoff = 1e3,
                                   double tail_threshold = 1e-12);

}  // namespace optreg
