#include "optreg/simulators.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "optreg/errors.hpp"
#include "optreg/rng.hpp"

namespace optreg {

namespace {

std::vector<double> grid(double horizon, double step) {
  if (!(step > 0.0)) throw DomainError("grid step must be positive");
  const auto full = static_cast<std::size_t>(std::floor(horizon / step * (1.0 + 1e-12)));
  std::vector<double> t;
  t.reserve(full + 2);
  for (std::size_t k = 0; k <= full; ++k) t.push_back(static_cast<double>(k) * step);
  if (std::abs(t.back() - horizon) <= 1e-9 * step) {
    t.back() = horizon;
  } else if (t.back() > horizon) {
    t.back() = horizon;
  } else {
    t.push_back(horizon);
  }
  if (t.size() > 1 && t[t.size() - 2] >= t.back()) t.erase(t.end() - 2);
  return t;
}

std::vector<double> arrivals(double rate, double horizon, std::uint64_t seed) {
  std::vector<double> out;
  if (rate <= 0.0) return out;
  Engine rng(seed);
  std::exponential_distribution<double> gap(rate);
  double t = gap(rng);
  while (t <= horizon) {
    if (t > 0.0) out.push_back(t);
    t += gap(rng);
  }
  return out;
}

double link(const ScenarioConfig& c) {
  if (c.kind != ScenarioKind::nonlinear || c.g_map == GMapKind::identity)
    return c.true_theta();
  if (c.theta < 0.0) throw DomainError("nonlinear scenario with g = sqrt needs theta >= 0");
  return std::sqrt(c.theta);
}

Integrator custom_integrator(const ScenarioConfig& c) {
  const double T = c.horizon;
  const DesignSpec& d = c.design;
  const LadlagPath right[] = {
      LadlagPath::line(T, d.rate),
      simulate_poisson_right(d.jump_rate_r, d.jump_size_r, T, derive_seed(c.seed, 4))};
  return Integrator(
      IncreasingPath(add(right)),
      IncreasingPath(simulate_poisson_left(d.jump_rate_g, d.jump_size_g, T,
                                           derive_seed(c.seed, 5))));
}

}  // namespace

LadlagPath simulate_wiener(double sigma, double horizon, double step,
                           std::uint64_t seed) {
  if (sigma < 0.0) throw DomainError("sigma must be nonnegative");
  const auto t = grid(horizon, step);
  std::vector<Event> ev(t.size());
  Engine rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  double w = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k > 0 && sigma > 0.0) w += sigma * std::sqrt(t[k] - t[k - 1]) * z(rng);
    ev[k] = Event{t[k], w, w, w};
  }
  return LadlagPath(std::move(ev), horizon, BetweenRule::linear);
}

LadlagPath simulate_poisson_right(double rate, double jump_size, double horizon,
                                  std::uint64_t seed) {
  if (rate < 0.0) throw DomainError("Poisson rate must be nonnegative");
  std::vector<Event> ev{Event{}};
  double level = 0.0;
  for (double t : arrivals(rate, horizon, seed)) {
    double next = level + jump_size;
    ev.push_back(Event{t, level, next, next});
    level = next;
  }
  return LadlagPath(std::move(ev), horizon);
}

LadlagPath simulate_poisson_left(double rate, double jump_size, double horizon,
                                 std::uint64_t seed) {
  if (rate < 0.0) throw DomainError("Poisson rate must be nonnegative");
  std::vector<Event> ev{Event{}};
  double level = 0.0;
  for (double t : arrivals(rate, horizon, seed)) {
    double next = level + jump_size;
    ev.push_back(Event{t, level, level, next});
    level = next;
  }
  return LadlagPath(std::move(ev), horizon);
}

LadlagPath simulate_noise(const NoiseSpec& noise, double horizon, double step,
                          std::uint64_t seed) {
  const LadlagPath parts[] = {
      simulate_wiener(noise.sigma, horizon, step, derive_seed(seed, 1)),
      simulate_poisson_right(noise.lambda_r, -noise.claim_size, horizon,
                             derive_seed(seed, 2)),
      LadlagPath::line(horizon, noise.claim_size * noise.lambda_r),
      simulate_poisson_left(noise.lambda_g, noise.gain_size, horizon,
                            derive_seed(seed, 3)),
      LadlagPath::line(horizon, -noise.gain_size * noise.lambda_g),
  };
  return close_at_horizon(add(parts));
}

BilinearIntegrand scenario_integrand(const ScenarioConfig& c,
                                     std::shared_ptr<const LadlagPath> state) {
  switch (c.kind) {
    case ScenarioKind::risk:
    case ScenarioKind::nonlinear:
      return BilinearIntegrand::constant(1.0);
    case ScenarioKind::gaussian_deterministic_f: {
      const double p = c.f_power;
      auto f = [p](double t) { return p == 0.0 ? 1.0 : std::pow(1.0 + t, p); };
      return BilinearIntegrand([f](double t, double) { return f(t); },
                               [f](double t, double, double) { return f(t); });
    }
    case ScenarioKind::ou: {
      if (!state) throw DomainError("the OU integrand needs the observed path");
      const double mu = c.mu;
      return BilinearIntegrand([mu](double, double left) { return mu - left; },
                               [](double, double, double) { return 0.0; },
                               std::move(state));
    }
    case ScenarioKind::custom:
      return BilinearIntegrand::constant(c.design.fr, c.design.fg);
  }
  throw DomainError("unknown scenario kind");
}

Design make_design(const ScenarioConfig& c, std::shared_ptr<const LadlagPath> X) {
  if (c.kind == ScenarioKind::custom)
    throw UnsupportedScenarioError(
        "custom scenarios draw a random integrator; it cannot be rebuilt from X");
  Integrator a = Integrator::time(X->horizon()).refined(X->times());
  return Design{scenario_integrand(c, std::move(X)), std::move(a)};
}

double scenario_xi(const ScenarioConfig& c) {
  const double rate = c.noise.bracket_rate();
  switch (c.kind) {
    case ScenarioKind::gaussian_deterministic_f:
      if (c.xi && *c.xi < rate)
        throw ConfigError("declared xi is below the noise bracket rate");
      return c.xi.value_or(rate);
    case ScenarioKind::custom:
      if (rate == 0.0) return 0.0;
      return c.design.rate > 0.0 ? rate / c.design.rate
                                 : std::numeric_limits<double>::infinity();
    default:
      return rate;
  }
}

SimulatedModel build_scenario(const ScenarioConfig& c) {
  c.validate();
  const double T = c.horizon;
  const double theta = c.true_theta();
  const double coef = link(c);
  const double xi = scenario_xi(c);
  const double bracket = c.kind == ScenarioKind::custom
                             ? xi
                             : c.noise.bracket_rate();
  LadlagPath M = simulate_noise(c.noise, T, c.step, c.seed);

  if (c.kind == ScenarioKind::ou) {
    // Euler scheme with the predictable integrand μ - X frozen at the right
    // limit of each grid event.
    const auto mev = M.events();
    std::vector<Event> xev(mev.size()), dev(mev.size());
    double d = 0.0;
    for (std::size_t i = 0; i < mev.size(); ++i) {
      if (i > 0) d += (c.mu - xev[i - 1].x_plus) * (mev[i].t - mev[i - 1].t);
      dev[i] = Event{mev[i].t, d, d, d};
      xev[i] = Event{mev[i].t, c.x0 + theta * d + mev[i].x_minus,
                     c.x0 + theta * d + mev[i].x, c.x0 + theta * d + mev[i].x_plus};
    }
    auto X = std::make_shared<const LadlagPath>(std::move(xev), T, BetweenRule::linear);
    LadlagPath drift(std::move(dev), T, BetweenRule::linear);
    Design design = make_design(c, X);
    return SimulatedModel{c,     X,     std::move(M), std::move(drift), std::move(design),
                          theta, coef, xi,           bracket};
  }

  Integrator a = c.kind == ScenarioKind::custom ? custom_integrator(c)
                                                : Integrator::time(T);
  const LadlagPath* skel[] = {&M, &a.right().path(), &a.left().path()};
  const auto times = union_times(skel);
  M = refine(M, times);
  a = a.refined(times);
  BilinearIntegrand f = scenario_integrand(c, nullptr);
  LadlagPath drift = integral_path(f, a.combined());
  const LadlagPath parts[] = {scale(drift, coef), M};
  auto X = std::make_shared<const LadlagPath>(add(parts));
  return SimulatedModel{c,     X,     std::move(M), std::move(drift), Design{f, a},
                        theta, coef, xi,           bracket};
}

}  // namespace optreg
