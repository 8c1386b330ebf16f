#pragma once

// Generative description of one model instance X = f∘a·θ + M.
//
// JSON schema (all keys optional except "kind"):
//
//   kind        "risk" | "ou" | "gaussian_deterministic_f" | "nonlinear" | "custom"
//   theta       true parameter (risk: derived from "premium" when given)
//   premium     risk premium rate c; θ = c - claim_size·lambda_r + gain_size·lambda_g
//   horizon     final time T
//   step        Wiener grid step h
//   sigma       Wiener scale σ
//   lambda_r    intensity of the right-continuous claim leg (jumps of -claim_size)
//   claim_size  a >= 0
//   lambda_g    intensity of the left-continuous gain leg (forward jumps of +gain_size)
//   gain_size   b >= 0
//   mu, x0      ou level and starting value
//   f_power     gaussian_deterministic_f design f_s = (1+s)^f_power
//   xi          declared noise ceiling for gaussian_deterministic_f (>= σ²)
//   g_map       nonlinear link: "sqrt" (default) or "identity"
//   design      custom integrator: {"rate", "fr", "fg", "jump_rate_r",
//               "jump_size_r", "jump_rate_g", "jump_size_g"}
//   seed        64-bit seed

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

namespace optreg {

enum class ScenarioKind { risk, ou, gaussian_deterministic_f, nonlinear, custom };

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& s);

struct NoiseSpec {
  double sigma = 0.0;
  double lambda_r = 0.0;
  double claim_size = 0.0;  // right jumps have size -claim_size
  double lambda_g = 0.0;
  double gain_size = 0.0;   // forward jumps have size +gain_size

  /// d⟨M⟩/dt = σ² + a²λ^r + b²λ^g for the compensated Wiener/Poisson noise.
  double bracket_rate() const {
    return sigma * sigma + claim_size * claim_size * lambda_r +
           gain_size * gain_size * lambda_g;
  }
  bool silent() const { return bracket_rate() == 0.0; }
};

/// Integrator and constant integrand for kind = custom:
/// a^r_t = rate·t + jump_size_r·N^r_t, a^g_t = jump_size_g·N^g_t (left
/// modification), f = (fr, fg).
struct DesignSpec {
  double rate = 1.0;
  double fr = 1.0;
  double fg = 1.0;
  double jump_rate_r = 0.0;
  double jump_size_r = 1.0;
  double jump_rate_g = 0.0;
  double jump_size_g = 1.0;
};

enum class GMapKind { sqrt, identity };

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::risk;
  double theta = 1.0;
  std::optional<double> premium;
  double horizon = 10.0;
  double step = 1e-3;
  NoiseSpec noise;
  double mu = 1.0;
  double x0 = 0.0;
  double f_power = 0.0;
  std::optional<double> xi;
  GMapKind g_map = GMapKind::sqrt;
  DesignSpec design;
  std::uint64_t seed = 0;

  /// θ after the risk reparameterisation.
  double true_theta() const;
  /// Throws ConfigError on invalid values.
  void validate() const;
};

/// Missing keys keep their defaults. `seed_present` reports whether the
/// object carried a "seed" key.
ScenarioConfig scenario_from_json(const nlohmann::json& j,
                                  bool* seed_present = nullptr);
nlohmann::json to_json(const ScenarioConfig& c);

}  // namespace optreg
