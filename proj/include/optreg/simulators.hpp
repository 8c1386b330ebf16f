#pragma once

#include <cstdint>
#include <memory>

#include "optreg/ladlag.hpp"
#include "optreg/optional_integral.hpp"
#include "optreg/scenario.hpp"

namespace optreg {

/// σW on the grid {0, h, 2h, ...} ∪ {T}; continuous, linear between events.
LadlagPath simulate_wiener(double sigma, double horizon, double step,
                           std::uint64_t seed);

/// jump_size·N_t for a right-continuous Poisson process of intensity `rate`:
/// each arrival carries Δ = jump_size and Δ⁺ = 0.
LadlagPath simulate_poisson_right(double rate, double jump_size, double horizon,
                                  std::uint64_t seed);

/// Left-continuous modification: the value at an arrival is the pre-jump
/// level and the right limit carries the jump (Δ = 0, Δ⁺ = jump_size).
LadlagPath simulate_poisson_left(double rate, double jump_size, double horizon,
                                 std::uint64_t seed);

/// M = σW - a(N^r - λ^r t) + b(N^g - λ^g t), closed at the horizon.
/// Components are drawn from derive_seed(seed, 1..3) and summed in that order.
LadlagPath simulate_noise(const NoiseSpec& noise, double horizon, double step,
                          std::uint64_t seed);

struct Design {
  BilinearIntegrand f;
  Integrator a;
};

/// f of the scenario; `state` is the observed path (required for ou only).
BilinearIntegrand scenario_integrand(const ScenarioConfig& config,
                                     std::shared_ptr<const LadlagPath> state);

/// Integrand and integrator of the scenario, laid on the skeleton of an
/// observed path X. Throws UnsupportedScenarioError for kind = custom, whose
/// integrator is random and cannot be recovered from X.
Design make_design(const ScenarioConfig& config,
                   std::shared_ptr<const LadlagPath> X);

struct SimulatedModel {
  ScenarioConfig config;
  std::shared_ptr<const LadlagPath> observed;  // X
  LadlagPath M;                                // true noise
  LadlagPath drift;                            // f∘a
  Design design;
  double theta;              // true parameter
  double drift_coefficient;  // θ, or g(θ) in the nonlinear scenario
  double xi_bound;           // ξ with d⟨M⟩/da <= ξ
  double bracket_rate;       // analytic d⟨M⟩/da

  const LadlagPath& X() const { return *observed; }
  const BilinearIntegrand& f() const { return design.f; }
  const Integrator& a() const { return design.a; }
};

/// Assembles f, a, M and X = x0 + drift_coefficient·(f∘a) + M for the
/// configured scenario (x0 = 0 except in the OU scenario). Every path shares
/// one skeleton closed at the horizon.
SimulatedModel build_scenario(const ScenarioConfig& config);

/// ξ of the scenario (may be +inf for a custom design without drift).
double scenario_xi(const ScenarioConfig& config);

}  // namespace optreg
