// optreg: command-line front end for simulation, estimation, testing and
// Monte Carlo experiments.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "optreg/conditions.hpp"
#include "optreg/errors.hpp"
#include "optreg/estimators.hpp"
#include "optreg/hypothesis.hpp"
#include "optreg/mc_harness.hpp"
#include "optreg/simulators.hpp"
#include "optreg/text.hpp"

namespace {

using namespace optreg;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out;
  std::string form = "corrected";
  bool form_given = false;
  int threads = 0;
};

nlohmann::json load_json(const std::string& path) {
  if (path.empty()) throw ConfigError("--config is required");
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
}

std::uint64_t resolve_seed(const Globals& g, bool file_has_seed, std::uint64_t file_seed) {
  if (g.seed) return *g.seed;
  if (file_has_seed) return file_seed;
  if (const char* env = std::getenv("OPT_REGRESS_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("OPT_REGRESS_SEED is not an unsigned integer");
  }
  return 0;
}

// Accepts either a bare scenario object or a full experiment config.
ScenarioConfig load_scenario(const Globals& g) {
  const auto j = load_json(g.config);
  bool has_seed = false;
  ScenarioConfig c = scenario_from_json(j.contains("scenario") ? j.at("scenario") : j, &has_seed);
  c.seed = resolve_seed(g, has_seed, c.seed);
  c.validate();
  return c;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw ConfigError("cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string estimator_row(const ScenarioConfig& c, const SequentialResult& r,
                          double theta_hat) {
  return "0," + std::to_string(c.seed) + "," + format_real(c.true_theta()) + "," +
         format_real(theta_hat) + "," + format_real(r.tau_H) + "," +
         format_real(r.beta_H) + "," + (r.crossed ? "true" : "false") + "," +
         to_string(r.form);
}

// Observed path and design: from --path when given, otherwise simulated.
struct Observation {
  std::shared_ptr<const LadlagPath> X;
  Design design;
};

Observation observe(const ScenarioConfig& c, const std::string& path) {
  if (path.empty()) {
    SimulatedModel m = build_scenario(c);
    return Observation{m.observed, m.design};
  }
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open path file " + path);
  auto X = std::make_shared<const LadlagPath>(read_csv(in));
  return Observation{X, make_design(c, X)};
}

int cmd_simulate(const Globals& g, const std::string& component) {
  const ScenarioConfig c = load_scenario(g);
  const SimulatedModel m = build_scenario(c);
  Output out(g.out);
  if (component == "X") write_csv(out.stream(), m.X());
  else if (component == "M") write_csv(out.stream(), m.M);
  else write_csv(out.stream(), m.drift);
  return 0;
}

int cmd_estimate(const Globals& g, const std::string& path, std::vector<double> times) {
  const ScenarioConfig c = load_scenario(g);
  const Observation obs = observe(c, path);
  if (times.empty()) times.push_back(obs.X->horizon());
  std::sort(times.begin(), times.end());
  const auto est = structural_ls(*obs.X, obs.design.f, obs.design.a, times);
  Output out(g.out);
  out.stream() << "t,theta_t\n";
  for (std::size_t k = 0; k < times.size(); ++k)
    out.stream() << format_real(times[k]) << ',' << format_real(est[k]) << '\n';
  return 0;
}

int cmd_sequential(const Globals& g, const std::string& path, double H) {
  const ScenarioConfig c = load_scenario(g);
  const EstimatorForm form = estimator_form_from_string(g.form);
  const Observation obs = observe(c, path);
  Output out(g.out);
  out.stream() << "replicate,seed,theta_true,theta_hat,tau_H,beta_H,crossed,form\n";
  if (c.kind == ScenarioKind::nonlinear) {
    const GMap link = c.g_map == GMapKind::sqrt ? GMap::sqrt_map() : GMap::identity();
    const auto r = nonlinear_sequential(*obs.X, obs.design.f, obs.design.a, H, link, form);
    out.stream() << estimator_row(c, r.inner, r.theta_hat) << '\n';
  } else {
    const auto r = sequential_ls(*obs.X, obs.design.f, obs.design.a, H, form);
    out.stream() << estimator_row(c, r, r.theta_hat) << '\n';
  }
  return 0;
}

int cmd_hypothesis(const Globals& g, double delta, double epsilon,
                   std::optional<double> H, const std::string& under) {
  const ScenarioConfig c = load_scenario(g);
  if (c.kind == ScenarioKind::nonlinear)
    throw ConfigError("hypothesis needs a linear scenario");
  const EstimatorForm form = estimator_form_from_string(g.form);
  const TestConfig test = H ? TestConfig{delta, epsilon, scenario_xi(c), *H}
                            : TestConfig::with_required_H(delta, epsilon, scenario_xi(c));
  test.validate();
  const SimulatedModel m = build_scenario(c);
  const bool h0 = under == "H0";
  const auto outcome = run_test(h0 ? m.X() : m.M, m.f(), m.a(), test, form);
  Output out(g.out);
  out.stream() << "replicate,true_hypothesis,theta,phi,decision,H,delta,epsilon\n";
  out.stream() << "0," << under << ',' << format_real(h0 ? c.true_theta() : 0.0) << ','
               << format_real(outcome ? outcome->phi : std::nan("")) << ','
               << (outcome ? to_string(outcome->decision) : std::string("none")) << ','
               << format_real(test.H) << ',' << format_real(delta) << ','
               << format_real(epsilon) << '\n';
  return 0;
}

int cmd_mc(const Globals& g) {
  const auto j = load_json(g.config);
  bool has_seed = false;
  ExperimentSpec spec = experiment_from_json(j, &has_seed);
  spec.scenario.seed = resolve_seed(g, has_seed, spec.scenario.seed);
  if (g.threads > 0) spec.threads = g.threads;
  if (g.form_given) spec.form = estimator_form_from_string(g.form);
  const McReport report = run_experiment(spec);
  const std::string out = g.out.empty() ? "mc_report.csv" : g.out;
  write_report_files(report, out);
  std::cout << report_csv(report);
  if (!report.annotation.empty()) std::cout << "# " << report.annotation << '\n';
  return report.passed() ? 0 : 2;
}

int cmd_check_conditions(const Globals& g, double q) {
  const ScenarioConfig c = load_scenario(g);
  Output out(g.out);
  auto& s = out.stream();
  s << "check,value\n";
  std::string value = "unsupported", diverges = "unsupported";
  try {
    value = format_real(slln_condition_eval(c, q));
    diverges = design_diverges(c) ? "true" : "false";
  } catch (const UnsupportedScenarioError&) {
  }
  s << "slln_condition_q" << format_real(q) << ',' << value << '\n';
  s << "design_diverges," << diverges << '\n';
  const GMap link = c.g_map == GMapKind::sqrt ? GMap::sqrt_map() : GMap::identity();
  const auto gc = g_condition_check(link.inverse);
  s << "g_condition_" << link.name << ',' << format_real(gc.value) << '\n';
  s << "g_condition_converged," << (gc.converged ? "true" : "false") << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optreg: least-squares estimation in optional regression models"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides config and OPT_REGRESS_SEED)");
  app.add_option("--config", g.config, "JSON config file");
  app.add_option("--out", g.out, "output file (default stdout; mc: mc_report.csv)");
  auto* form_opt = app.add_option("--form", g.form, "sequential estimator form")
      ->check(CLI::IsMember({"corrected", "literal"}));
  app.add_option("--threads", g.threads, "OpenMP team size for mc");

  std::string component = "X";
  auto* simulate = app.add_subcommand("simulate", "dump a simulated path as CSV");
  simulate->add_option("--component", component, "X, M or drift")
      ->check(CLI::IsMember({"X", "M", "drift"}));

  std::string path;
  std::vector<double> times;
  auto* estimate = app.add_subcommand("estimate", "structural LS estimate");
  estimate->add_option("--path", path, "observed path CSV (default: simulate)");
  estimate->add_option("--t", times, "evaluation times (default: horizon)");

  double H = 0.0;
  auto* sequential = app.add_subcommand("sequential", "sequential LS estimate");
  sequential->add_option("--H", H, "information level")->required();
  sequential->add_option("--path", path, "observed path CSV (default: simulate)");

  double delta = 1.0, epsilon = 0.05, test_H = 0.0;
  std::string under = "H0";
  auto* hypothesis = app.add_subcommand("hypothesis", "sequential test of H0 against H1");
  hypothesis->add_option("--delta", delta, "separation δ");
  hypothesis->add_option("--epsilon", epsilon, "error level ε");
  auto* H_opt = hypothesis->add_option("--H", test_H, "information level (default 4ξ/(δ²ε))");
  hypothesis->add_option("--under", under, "hypothesis that generates the data")
      ->check(CLI::IsMember({"H0", "H1"}));

  auto* mc = app.add_subcommand("mc", "run a Monte Carlo experiment");

  double q = 2.0;
  auto* check = app.add_subcommand("check-conditions", "consistency and link conditions");
  check->add_option("--q", q, "exponent q in [1, 2]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (*seed_opt) g.seed = seed;
  g.form_given = form_opt->count() > 0;

  try {
    if (*simulate) return cmd_simulate(g, component);
    if (*estimate) return cmd_estimate(g, path, times);
    if (*sequential) return cmd_sequential(g, path, H);
    if (*hypothesis)
      return cmd_hypothesis(g, delta, epsilon,
                            *H_opt ? std::optional<double>(test_H) : std::nullopt, under);
    if (*mc) return cmd_mc(g);
    if (*check) return cmd_check_conditions(g, q);
  } catch (const std::exception& e) {
    std::cerr << "optreg: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
