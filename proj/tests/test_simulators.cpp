#include <doctest.h>

#include <cmath>
#include <vector>

#include "optreg/errors.hpp"
#include "optreg/optional_integral.hpp"
#include "optreg/rng.hpp"
#include "optreg/simulators.hpp"

using namespace optreg;

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.var += (x - m.mean) * (x - m.mean);
  m.var /= static_cast<double>(v.size() - 1);
  return m;
}

ScenarioConfig risk_config() {
  ScenarioConfig c;
  c.kind = ScenarioKind::risk;
  c.premium = 2.0;
  c.horizon = 5.0;
  c.step = 1e-2;
  c.noise = NoiseSpec{1.0, 0.5, 1.0, 0.3, 1.0};
  return c;
}

ScenarioConfig ou_config(double step, double sigma = 0.5) {
  ScenarioConfig c;
  c.kind = ScenarioKind::ou;
  c.theta = 1.0;
  c.mu = 1.0;
  c.x0 = 0.0;
  c.horizon = 3.0;
  c.step = step;
  c.noise.sigma = sigma;
  return c;
}

double ou_max_error(double step) {
  const auto m = build_scenario(ou_config(step, 0.0));
  double err = 0.0;
  for (const auto& e : m.X().events())
    err = std::max(err, std::abs(e.x - (1.0 - std::exp(-e.t))));
  return err;
}

std::vector<ScenarioConfig> all_kinds() {
  std::vector<ScenarioConfig> out;
  out.push_back(risk_config());
  out.push_back(ou_config(1e-2));
  ScenarioConfig g;
  g.kind = ScenarioKind::gaussian_deterministic_f;
  g.theta = 1.8;
  g.f_power = 1.0;
  g.horizon = 3.0;
  g.step = 1e-2;
  g.noise.sigma = 1.0;
  out.push_back(g);
  ScenarioConfig n = risk_config();
  n.kind = ScenarioKind::nonlinear;
  n.premium.reset();
  n.theta = 4.0;
  out.push_back(n);
  ScenarioConfig u;
  u.kind = ScenarioKind::custom;
  u.theta = 1.5;
  u.horizon = 5.0;
  u.step = 1e-2;
  u.noise = NoiseSpec{0.5, 0.5, 1.0, 0.0, 0.0};
  u.design = DesignSpec{0.0, 1.0, 1.5, 0.7, 1.0, 0.4, 0.5};
  out.push_back(u);
  return out;
}

}  // namespace

TEST_CASE("derive_seed separates streams") {
  CHECK(derive_seed(1, 1) != derive_seed(1, 2));
  CHECK(derive_seed(1, 1) != derive_seed(2, 1));
  CHECK(derive_seed(42, 7) == derive_seed(42, 7));
}

TEST_CASE("wiener: zero scale gives the zero path on the grid") {
  const auto W = simulate_wiener(0.0, 1.0, 0.25, 3);
  REQUIRE(W.size() == 5);
  for (const auto& e : W.events()) {
    CHECK(e.x_minus == 0.0);
    CHECK(e.x == 0.0);
    CHECK(e.x_plus == 0.0);
  }
  CHECK(W.back().t == 1.0);
}

TEST_CASE("wiener: grid closes at a horizon off the step lattice") {
  const auto W = simulate_wiener(1.0, 1.05, 0.1, 3);
  CHECK(W.back().t == 1.05);
  CHECK(W[W.size() - 2].t == doctest::Approx(1.0));
}

TEST_CASE("wiener: terminal moments over 10^4 seeds") {
  std::vector<double> wt;
  for (std::uint64_t s = 0; s < 10000; ++s)
    wt.push_back(simulate_wiener(1.0, 1.0, 1e-3, derive_seed(11, s)).back().x);
  const auto m = moments(wt);
  CHECK(std::abs(m.mean) <= 4.0 / std::sqrt(1e4));
  CHECK(std::abs(m.var - 1.0) <= 0.1);
}

TEST_CASE("wiener: continuous and reproducible") {
  const auto a = simulate_wiener(2.0, 3.0, 1e-2, 99);
  const auto b = simulate_wiener(2.0, 3.0, 1e-2, 99);
  CHECK(a == b);
  CHECK(a != simulate_wiener(2.0, 3.0, 1e-2, 100));
  for (const auto& e : a.events()) {
    CHECK(e.delta() == 0.0);
    CHECK(e.delta_plus() == 0.0);
  }
  CHECK_THROWS_AS(simulate_wiener(-1.0, 1.0, 0.1, 0), DomainError);
  CHECK_THROWS_AS(simulate_wiener(1.0, 1.0, 0.0, 0), DomainError);
}

TEST_CASE("right Poisson: zero rate gives the zero path") {
  const auto N = simulate_poisson_right(0.0, 1.0, 10.0, 5);
  CHECK(jumps(N).empty());
  CHECK(value_at(N, 10.0) == 0.0);
}

TEST_CASE("right Poisson: counts and jump sides") {
  std::vector<double> counts;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const auto N = simulate_poisson_right(2.0, 1.0, 10.0, derive_seed(21, s));
    for (const auto& e : N.events()) {
      if (e.t == 0.0) continue;
      CHECK_EQ(e.delta(), 1.0);
      CHECK_EQ(e.delta_plus(), 0.0);
    }
    counts.push_back(value_at(N, 10.0));
  }
  const auto m = moments(counts);
  CHECK(std::abs(m.mean - 20.0) <= 4.0 * std::sqrt(20.0 / 1e4));
  CHECK_THROWS_AS(simulate_poisson_right(-1.0, 1.0, 1.0, 0), DomainError);
}

TEST_CASE("left Poisson: a single arrival jumps on the right side only") {
  // Find a seed with exactly one arrival on [0, 1].
  for (std::uint64_t s = 0;; ++s) {
    const auto N = simulate_poisson_left(1.0, 2.5, 1.0, s);
    if (jumps(N).size() != 1) continue;
    const double t1 = jumps(N)[0].t;
    CHECK(value_at(N, t1, Side::at) == 0.0);
    CHECK(value_at(N, t1, Side::left) == 0.0);
    CHECK(value_at(N, t1, Side::right) == 2.5);
    CHECK(jumps(N)[0].delta == 0.0);
    CHECK(jumps(N)[0].delta_plus == 2.5);
    break;
  }
}

TEST_CASE("left Poisson: counts over 10^4 seeds") {
  std::vector<double> counts;
  for (std::uint64_t s = 0; s < 10000; ++s)
    counts.push_back(value_at(simulate_poisson_left(3.0, 1.0, 10.0, derive_seed(31, s)),
                              10.0, Side::right));
  const auto m = moments(counts);
  CHECK(std::abs(m.mean - 30.0) <= 4.0 * std::sqrt(30.0 / 1e4));
}

TEST_CASE("left Poisson: compensated count over a long horizon is small relative to t") {
  const double T = 1e4;
  const auto N = simulate_poisson_left(1.0, 1.0, T, 8);
  const auto compensated = add(N, LadlagPath::line(T, -1.0));
  const auto A = IncreasingPath(LadlagPath::line(T, 1.0));
  const auto tail = kronecker_tail_max(compensated, A, 0.9 * T);
  REQUIRE(tail.has_value());
  CHECK(*tail < 0.05);
}

TEST_CASE("noise: components, compensators and closure") {
  const NoiseSpec noise{1.0, 0.5, 2.0, 0.3, 1.5};
  const auto M = simulate_noise(noise, 4.0, 1e-2, 17);
  CHECK(M.back().t == 4.0);
  CHECK(M == simulate_noise(noise, 4.0, 1e-2, 17));
  CHECK(noise.bracket_rate() == doctest::Approx(1.0 + 4.0 * 0.5 + 2.25 * 0.3));
  for (const auto& j : jumps(M)) {
    const bool claim = j.delta == doctest::Approx(-2.0) && j.delta_plus == 0.0;
    const bool gain = j.delta == 0.0 && j.delta_plus == doctest::Approx(1.5);
    CHECK((claim || gain));
  }
  // Silent noise is the zero path.
  const auto Z = simulate_noise(NoiseSpec{}, 2.0, 0.5, 1);
  for (const auto& e : Z.events()) CHECK(e.x == 0.0);
}

TEST_CASE("risk scenario: noiseless path is the premium line and F = t") {
  ScenarioConfig c = risk_config();
  c.premium.reset();
  c.theta = 1.0;
  c.noise = NoiseSpec{};
  const auto m = build_scenario(c);
  for (const auto& e : m.X().events()) {
    CHECK(e.x == doctest::Approx(e.t).epsilon(1e-14));
    CHECK(e.delta() == 0.0);
  }
  const auto F = F_process(m.f(), m.a());
  for (const auto& e : F.path().events()) CHECK(e.x == doctest::Approx(e.t).epsilon(1e-14));
}

TEST_CASE("risk scenario: premium reparameterisation and xi") {
  ScenarioConfig c = risk_config();
  c.premium = 2.0;
  c.noise = NoiseSpec{1.0, 0.5, 1.0, 0.3, 1.0};
  const auto m = build_scenario(c);
  CHECK(m.theta == doctest::Approx(1.8));
  CHECK(m.drift_coefficient == doctest::Approx(1.8));
  CHECK(m.xi_bound == doctest::Approx(1.8));
  CHECK(scenario_xi(c) == doctest::Approx(1.8));
}

TEST_CASE("every scenario: X = coefficient * drift + M (+ x0) on one skeleton") {
  for (auto c : all_kinds()) {
    CAPTURE(to_string(c.kind));
    c.seed = 1234;
    const auto m = build_scenario(c);
    REQUIRE(m.X().size() == m.M.size());
    REQUIRE(m.drift.size() == m.M.size());
    CHECK(m.X().back().t == c.horizon);
    for (std::size_t i = 0; i < m.M.size(); ++i) {
      const auto& x = m.X()[i];
      const auto& d = m.drift[i];
      const auto& n = m.M[i];
      REQUIRE(x.t == n.t);
      REQUIRE(d.t == n.t);
      const double c0 = c.kind == ScenarioKind::ou ? c.x0 : 0.0;
      CHECK(x.x_minus == doctest::Approx(c0 + m.drift_coefficient * d.x_minus + n.x_minus));
      CHECK(x.x == doctest::Approx(c0 + m.drift_coefficient * d.x + n.x));
      CHECK(x.x_plus == doctest::Approx(c0 + m.drift_coefficient * d.x_plus + n.x_plus));
    }
    // Same seed, same model; different seed, different noise.
    CHECK(build_scenario(c).X() == m.X());
    c.seed = 1235;
    CHECK(build_scenario(c).M != m.M);
  }
}

TEST_CASE("every scenario: noise terminal value has mean zero") {
  for (auto c : all_kinds()) {
    CAPTURE(to_string(c.kind));
    const int n = 2000;
    std::vector<double> mt;
    for (int i = 0; i < n; ++i) {
      c.seed = derive_seed(77, static_cast<std::uint64_t>(i));
      mt.push_back(build_scenario(c).M.back().x_plus);
    }
    const auto m = moments(mt);
    CHECK(std::abs(m.mean) <= 4.0 * std::sqrt(m.var / n));
  }
}

TEST_CASE("nonlinear scenario: link coefficient and domain") {
  ScenarioConfig c = all_kinds()[3];
  const auto m = build_scenario(c);
  CHECK(m.theta == 4.0);
  CHECK(m.drift_coefficient == 2.0);
  c.theta = -1.0;
  CHECK_THROWS_AS(build_scenario(c), DomainError);
  c.g_map = GMapKind::identity;
  CHECK(build_scenario(c).drift_coefficient == -1.0);
}

TEST_CASE("OU noiseless path against 1 - exp(-t)") {
  // The predictable Euler scheme is first order: error ~ h/(2e).
  const double e1 = ou_max_error(1e-3);
  const double e2 = ou_max_error(5e-4);
  CHECK(e1 <= 2e-4);
  CHECK(e2 <= 1e-4);
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("OU integrand only looks at the left limit of X") {
  const auto m = build_scenario(ou_config(0.1));
  const auto& X = m.X();
  const std::size_t k = X.size() / 2;
  const double s = X[k].t;
  // Replace the value at s and after it; [0, s) is untouched.
  std::vector<Event> ev(X.events().begin(), X.events().end());
  for (std::size_t i = k; i < ev.size(); ++i) {
    if (i > k) ev[i].x_minus += 3.0;
    ev[i].x += 3.0;
    ev[i].x_plus += 3.0;
  }
  auto perturbed = std::make_shared<const LadlagPath>(std::move(ev), X.horizon(), X.rule());
  const auto f0 = scenario_integrand(m.config, m.observed);
  const auto f1 = scenario_integrand(m.config, perturbed);
  const double left = value_at(X, s, Side::left);
  CHECK(f0.predictable_at(s, left) == f1.predictable_at(s, value_at(*perturbed, s, Side::left)));
  // f∘a on [0, s] agrees.
  CHECK(optional_integral(f0, m.a(), s) == optional_integral(f1, m.a(), s));
}

TEST_CASE("OU bracket and design") {
  const auto m = build_scenario(ou_config(1e-2));
  CHECK(m.xi_bound == doctest::Approx(0.25));
  CHECK(m.f().state() == m.observed.get());
  CHECK_THROWS_AS(scenario_integrand(m.config, nullptr), DomainError);
}

TEST_CASE("custom scenario: random integrator and xi") {
  ScenarioConfig c = all_kinds()[4];
  c.seed = 5;
  const auto m = build_scenario(c);
  CHECK(std::isinf(m.xi_bound));
  CHECK_THROWS_AS(make_design(c, m.observed), UnsupportedScenarioError);
  c.design.rate = 2.0;
  CHECK(scenario_xi(c) == doctest::Approx(0.75 / 2.0));
  c.noise = NoiseSpec{};
  CHECK(scenario_xi(c) == 0.0);
}

TEST_CASE("gaussian scenario: declared xi must dominate the bracket") {
  ScenarioConfig c = all_kinds()[2];
  CHECK(scenario_xi(c) == 1.0);
  c.xi = 2.0;
  CHECK(scenario_xi(c) == 2.0);
  c.xi = 0.5;
  CHECK_THROWS_AS(scenario_xi(c), ConfigError);
}

TEST_CASE("make_design rebuilds the simulated design from X") {
  for (auto c : all_kinds()) {
    if (c.kind == ScenarioKind::custom) continue;
    CAPTURE(to_string(c.kind));
    const auto m = build_scenario(c);
    const auto d = make_design(c, m.observed);
    const double T = c.horizon;
    CHECK(optional_integral(d.f, d.a, T) ==
          doctest::Approx(optional_integral(m.f(), m.a(), T)).epsilon(1e-12));
  }
}

TEST_CASE("scenario JSON") {
  const auto c = all_kinds()[4];
  bool seed = true;
  auto j = to_json(c);
  j.erase("seed");
  const auto back = scenario_from_json(j, &seed);
  CHECK_FALSE(seed);
  CHECK(to_json(back) == to_json(c));
  j["seed"] = 12;
  CHECK(scenario_from_json(j, &seed).seed == 12);
  CHECK(seed);
  j["bogus"] = 1;
  CHECK_THROWS_AS(scenario_from_json(j), ConfigError);
  j.erase("bogus");
  j["step"] = -1.0;
  CHECK_THROWS_AS(scenario_from_json(j), ConfigError);
  j["step"] = 0.1;
  j["kind"] = "nope";
  CHECK_THROWS_AS(scenario_from_json(j), ConfigError);
  j["kind"] = "ou";
  j["premium"] = 1.0;
  CHECK_THROWS_AS(scenario_from_json(j), ConfigError);
}
