#include "optreg/scenario.hpp"

#include <cmath>

#include "optreg/errors.hpp"

namespace optreg {

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::risk: return "risk";
    case ScenarioKind::ou: return "ou";
    case ScenarioKind::gaussian_deterministic_f: return "gaussian_deterministic_f";
    case ScenarioKind::nonlinear: return "nonlinear";
    case ScenarioKind::custom: return "custom";
  }
  return "?";
}

ScenarioKind scenario_kind_from_string(const std::string& s) {
  if (s == "risk") return ScenarioKind::risk;
  if (s == "ou") return ScenarioKind::ou;
  if (s == "gaussian_deterministic_f") return ScenarioKind::gaussian_deterministic_f;
  if (s == "nonlinear") return ScenarioKind::nonlinear;
  if (s == "custom") return ScenarioKind::custom;
  throw ConfigError("unknown scenario kind '" + s + "'");
}

double ScenarioConfig::true_theta() const {
  if (kind == ScenarioKind::risk && premium)
    return *premium - noise.claim_size * noise.lambda_r +
           noise.gain_size * noise.lambda_g;
  return theta;
}

void ScenarioConfig::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(std::isfinite(step) && step > 0.0, "step must be positive");
  require(std::isfinite(horizon) && horizon >= step, "horizon must be >= step");
  require(std::isfinite(theta), "theta must be finite");
  require(noise.sigma >= 0.0 && noise.lambda_r >= 0.0 && noise.lambda_g >= 0.0,
          "noise scales and rates must be nonnegative");
  require(noise.claim_size >= 0.0 && noise.gain_size >= 0.0,
          "claim_size and gain_size must be nonnegative");
  require(design.rate >= 0.0 && design.jump_rate_r >= 0.0 &&
              design.jump_rate_g >= 0.0 && design.jump_size_r >= 0.0 &&
              design.jump_size_g >= 0.0,
          "design rates and jump sizes must be nonnegative");
  if (xi) require(*xi >= 0.0, "xi must be nonnegative");
  if (premium) require(kind == ScenarioKind::risk, "premium only applies to risk");
}

namespace {

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

ScenarioConfig scenario_from_json(const nlohmann::json& j, bool* seed_present) {
  if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
  static const char* known[] = {
      "kind", "theta", "premium", "horizon", "step", "sigma", "lambda_r",
      "claim_size", "lambda_g", "gain_size", "mu", "x0", "f_power", "xi",
      "g_map", "design", "seed"};
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown scenario key '" + key + "'");
  }
  ScenarioConfig c;
  std::string kind = "risk";
  read(j, "kind", kind);
  c.kind = scenario_kind_from_string(kind);
  read(j, "theta", c.theta);
  if (j.contains("premium")) {
    double p = 0.0;
    read(j, "premium", p);
    c.premium = p;
  }
  read(j, "horizon", c.horizon);
  read(j, "step", c.step);
  read(j, "sigma", c.noise.sigma);
  read(j, "lambda_r", c.noise.lambda_r);
  read(j, "claim_size", c.noise.claim_size);
  read(j, "lambda_g", c.noise.lambda_g);
  read(j, "gain_size", c.noise.gain_size);
  read(j, "mu", c.mu);
  read(j, "x0", c.x0);
  read(j, "f_power", c.f_power);
  if (j.contains("xi")) {
    double xi = 0.0;
    read(j, "xi", xi);
    c.xi = xi;
  }
  std::string g = "sqrt";
  read(j, "g_map", g);
  if (g == "sqrt") {
    c.g_map = GMapKind::sqrt;
  } else if (g == "identity") {
    c.g_map = GMapKind::identity;
  } else {
    throw ConfigError("unknown g_map '" + g + "'");
  }
  if (j.contains("design")) {
    const auto& d = j.at("design");
    if (!d.is_object()) throw ConfigError("design must be an object");
    read(d, "rate", c.design.rate);
    read(d, "fr", c.design.fr);
    read(d, "fg", c.design.fg);
    read(d, "jump_rate_r", c.design.jump_rate_r);
    read(d, "jump_size_r", c.design.jump_size_r);
    read(d, "jump_rate_g", c.design.jump_rate_g);
    read(d, "jump_size_g", c.design.jump_size_g);
  }
  if (seed_present) *seed_present = j.contains("seed");
  read(j, "seed", c.seed);
  c.validate();
  return c;
}

nlohmann::json to_json(const ScenarioConfig& c) {
  nlohmann::json j;
  j["kind"] = to_string(c.kind);
  j["theta"] = c.theta;
  if (c.premium) j["premium"] = *c.premium;
  j["horizon"] = c.horizon;
  j["step"] = c.step;
  j["sigma"] = c.noise.sigma;
  j["lambda_r"] = c.noise.lambda_r;
  j["claim_size"] = c.noise.claim_size;
  j["lambda_g"] = c.noise.lambda_g;
  j["gain_size"] = c.noise.gain_size;
  j["mu"] = c.mu;
  j["x0"] = c.x0;
  j["f_power"] = c.f_power;
  if (c.xi) j["xi"] = *c.xi;
  j["g_map"] = c.g_map == GMapKind::sqrt ? "sqrt" : "identity";
  j["design"] = {{"rate", c.design.rate},
                 {"fr", c.design.fr},
                 {"fg", c.design.fg},
                 {"jump_rate_r", c.design.jump_rate_r},
                 {"jump_size_r", c.design.jump_size_r},
                 {"jump_rate_g", c.design.jump_rate_g},
                 {"jump_size_g", c.design.jump_size_g}};
  j["seed"] = c.seed;
  return j;
}

}  // namespace optreg
