#pragma once

// Pathwise optional stochastic integrals
//
//   f∘Y_t = ∫_{]0,t]} f^r_s dY^r_s + ∫_{[0,t[} f^g_s dY^g_{s+}
//
// evaluated on an event skeleton. The right leg carries the continuous
// increments of Y and its jumps ΔY; the left leg carries the forward jumps
// Δ⁺Y. On the open segment after event t_i the predictable integrand is
// frozen at its value seen from t_i+, so a simulated Wiener increment is
// always multiplied by information available before it.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "optreg/ladlag.hpp"

namespace optreg {

/// f^r as a function of time and the state's left limit X_{t-}.
using PredictableRule = std::function<double(double t, double state_left)>;
/// f^g as a function of time, X_{t-} and X_t.
using OptionalRule =
    std::function<double(double t, double state_left, double state_at)>;

/// The pair f = (f^r, f^g). An optional state path (e.g. the observed X for
/// an autoregressive design) is fed to the rules; stateless integrands see
/// zeros.
class BilinearIntegrand {
 public:
  BilinearIntegrand(PredictableRule predictable, OptionalRule optional,
                    std::shared_ptr<const LadlagPath> state = nullptr);

  static BilinearIntegrand constant(double fr, double fg);
  static BilinearIntegrand constant(double f) { return constant(f, f); }

  /// Throws EvaluationError naming t when the rule is empty or not finite.
  double predictable_at(double t, double state_left) const;
  double optional_at(double t, double state_left, double state_at) const;

  /// (f^r)², (f^g)², sharing the same state.
  BilinearIntegrand squared() const;

  const LadlagPath* state() const noexcept { return state_.get(); }
  const std::shared_ptr<const LadlagPath>& state_ptr() const noexcept {
    return state_;
  }

 private:
  PredictableRule predictable_;
  OptionalRule optional_;
  std::shared_ptr<const LadlagPath> state_;
};

/// alpha*f + beta*g. Both must share the same state (or both be stateless).
BilinearIntegrand combine(double alpha, const BilinearIntegrand& f, double beta,
                          const BilinearIntegrand& g);

/// a = a^r + a^g. a^r is right-continuous (continuous growth and ΔA only),
/// a^g is left-continuous and grows only through Δ⁺ jumps.
class Integrator {
 public:
  Integrator(IncreasingPath right, IncreasingPath left);

  /// a_t = t on [0, horizon].
  static Integrator time(double horizon);
  static Integrator from_right(IncreasingPath right);

  const IncreasingPath& right() const noexcept { return right_; }
  const IncreasingPath& left() const noexcept { return left_; }
  double horizon() const noexcept { return right_.path().horizon(); }

  /// a^r + a^g as a single path.
  LadlagPath combined() const;

  /// Both legs refined onto the given times.
  Integrator refined(std::span<const double> times) const;

 private:
  IncreasingPath right_;
  IncreasingPath left_;
};

/// Cumulative trajectory t ↦ f∘Y_t on the union of Y's events, the state's
/// events, the horizon and `extra_times`. Sums are Neumaier-compensated.
LadlagPath integral_path(const BilinearIntegrand& f, const LadlagPath& integrator,
                         std::span<const double> extra_times = {});

/// f∘a_t.
double optional_integral(const BilinearIntegrand& f, const Integrator& a,
                         double t);

/// F = f²∘a as a path; its ΔF_t = (f^r_t)²Δa_t and Δ⁺F_t = (f^g_t)²Δ⁺a_t.
IncreasingPath F_process(const BilinearIntegrand& f, const Integrator& a,
                         std::span<const double> extra_times = {});

/// f∘X_t for an observed (non-monotone) semimartingale path X.
double integrate_against_path(const BilinearIntegrand& f, const LadlagPath& X,
                              double t);

/// Y_t = ∫_{]0,t]} (1+A_s)^{-1} dN^r_s + ∫_{[0,t[} (1+A_{s+})^{-1} dN^g_{s+}.
/// Exact on segments where N and A are both linear.
LadlagPath y_process(const LadlagPath& N, const IncreasingPath& A);

/// Inverse map of y_process: rebuilds N - N_0 from Y and A, weighting each
/// segment by the logarithmic mean of 1+A, the jumps by 1+A_s and 1+A_{s+}.
LadlagPath invert_y_process(const LadlagPath& Y, const IncreasingPath& A);

/// ⟨Y^c⟩_t = σ² ∫_0^t (1+A_s)^{-2} ds for N = σW, in closed form per
/// linear segment of A.
IncreasingPath wiener_y_bracket(double sigma, const IncreasingPath& A);

/// D_t = ⟨Y^c⟩_t + Σ_{0<s≤t} ΔY²/(1+|ΔY|) + Σ_{0≤s<t} (Δ⁺Y)²/(1+|Δ⁺Y|).
IncreasingPath d_process(const LadlagPath& Y, const IncreasingPath& bracket_c);

struct NormalizedPoint {
  double t;
  double ratio;  // N_t / A_t
};

/// A_t⁻¹N_t at every union event where A_t > 0.
std::vector<NormalizedPoint> kronecker_diagnostic(const LadlagPath& N,
                                                  const IncreasingPath& A);

/// sup of |N/A| over t >= t_from, taken over left limits, values and right
/// limits at every event. Between events N and A are linear so N/A is
/// monotone and the supremum is attained at these points. Returns nullopt if
/// A vanishes somewhere in the tail.
std::optional<double> kronecker_tail_max(const LadlagPath& N,
                                         const IncreasingPath& A, double t_from);

}  // namespace optreg
