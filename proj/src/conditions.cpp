#include "optreg/conditions.hpp"

#include <cmath>
#include <limits>

#include "optreg/errors.hpp"

namespace optreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ∫_0^∞ (1+s)^{-q} ds.
double power_tail(double q) { return q > 1.0 ? 1.0 / (q - 1.0) : kInf; }

// F_∞ = ∫_0^∞ (1+s)^{2p} ds.
double gaussian_design_limit(double p) {
  return 2.0 * p >= -1.0 ? kInf : 1.0 / (-2.0 * p - 1.0);
}

bool has_jumps(const NoiseSpec& n) {
  return n.lambda_r * n.claim_size != 0.0 || n.lambda_g * n.gain_size != 0.0;
}

}  // namespace

double slln_condition_eval(const ScenarioConfig& c, double q) {
  if (!(q >= 1.0 && q <= 2.0)) throw DomainError("q must lie in [1, 2]");
  const NoiseSpec& n = c.noise;
  switch (c.kind) {
    case ScenarioKind::risk:
    case ScenarioKind::nonlinear: {
      double value = n.sigma * n.sigma;  // σ² ∫ (1+s)^{-2} ds
      const double jr = std::pow(n.claim_size, q) * n.lambda_r;
      const double jg = std::pow(n.gain_size, q) * n.lambda_g;
      if (jr > 0.0) value += jr * power_tail(q);
      if (jg > 0.0) value += jg * power_tail(q);
      return value;
    }
    case ScenarioKind::gaussian_deterministic_f: {
      if (has_jumps(n))
        throw UnsupportedScenarioError(
            "gaussian_deterministic_f condition needs Wiener-only noise");
      // d⟨N^c⟩ = σ² f² ds = σ² dF, so the integral is σ² F_∞ / (1 + F_∞).
      const double f_inf = gaussian_design_limit(c.f_power);
      const double s2 = n.sigma * n.sigma;
      return std::isinf(f_inf) ? s2 : s2 * f_inf / (1.0 + f_inf);
    }
    default:
      throw UnsupportedScenarioError("no closed-form condition for scenario kind " +
                                     to_string(c.kind));
  }
}

bool design_diverges(const ScenarioConfig& c) {
  switch (c.kind) {
    case ScenarioKind::risk:
    case ScenarioKind::nonlinear:
      return true;
    case ScenarioKind::gaussian_deterministic_f:
      return std::isinf(gaussian_design_limit(c.f_power));
    default:
      throw UnsupportedScenarioError("no closed-form design limit for scenario kind " +
                                     to_string(c.kind));
  }
}

}  // namespace optreg
