#include "optreg/mc_harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "optreg/conditions.hpp"
#include "optreg/errors.hpp"
#include "optreg/hypothesis.hpp"
#include "optreg/optional_integral.hpp"
#include "optreg/parallel.hpp"
#include "optreg/rng.hpp"
#include "optreg/simulators.hpp"
#include "optreg/text.hpp"

namespace optreg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* kEstimatorHeader = "replicate,seed,theta_true,theta_hat,tau_H,beta_H,crossed,form";
const char* kHypothesisHeader = "replicate,true_hypothesis,theta,phi,decision,H,delta,epsilon";
const char* kConsistencyHeader = "replicate,seed,T,theta_true,theta_T,abs_error";
const char* kKroneckerHeader = "replicate,seed,t_from,tail_max,below_tolerance";

std::string b(bool v) { return v ? "true" : "false"; }

struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;
};

// Two passes in index order; NaNs are skipped.
Moments moments(const std::vector<double>& xs) {
  Moments m;
  double sum = 0.0;
  for (double x : xs)
    if (!std::isnan(x)) {
      sum += x;
      ++m.n;
    }
  if (m.n == 0) {
    m.mean = kNaN;
    m.variance = kNaN;
    return m;
  }
  m.mean = sum / static_cast<double>(m.n);
  if (m.n < 2) {
    m.variance = kNaN;
    return m;
  }
  double ss = 0.0;
  for (double x : xs)
    if (!std::isnan(x)) ss += (x - m.mean) * (x - m.mean);
  m.variance = ss / static_cast<double>(m.n - 1);
  return m;
}

double median(std::vector<double> xs) {
  std::erase_if(xs, [](double x) { return std::isnan(x); });
  if (xs.empty()) return kNaN;
  std::sort(xs.begin(), xs.end());
  const std::size_t k = xs.size() / 2;
  return xs.size() % 2 ? xs[k] : 0.5 * (xs[k - 1] + xs[k]);
}

template <typename Result, typename Kernel>
std::vector<Result> map_replicates(const ExperimentSpec& spec, Execution execution,
                                   Kernel&& kernel) {
  if (execution == Execution::serial)
    return map_replicates_serial<Result>(spec.replicates, kernel);
  return map_replicates_parallel<Result>(spec.replicates, spec.threads, kernel);
}

ScenarioConfig seeded(ScenarioConfig c, std::uint64_t seed) {
  c.seed = seed;
  return c;
}

std::vector<double> sorted_levels(const ExperimentSpec& spec) {
  std::vector<double> levels = spec.levels;
  std::sort(levels.begin(), levels.end());
  return levels;
}

// ---- sequential estimator cells (unbiasedness, variance_bound, nonlinear_bias)

struct EstimatorRow {
  std::uint64_t seed = 0;
  double theta_hat = kNaN;
  double tau = 0.0;
  double beta = 0.0;
  bool crossed = false;
};

McCell estimator_cell(const ExperimentSpec& spec, double H, double theta,
                      double xi, const std::vector<EstimatorRow>& rows,
                      RawTable& raw) {
  std::vector<double> values;
  values.reserve(rows.size());
  std::size_t crossed = 0;
  raw.header = kEstimatorHeader;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const EstimatorRow& r = rows[i];
    values.push_back(r.crossed ? r.theta_hat : kNaN);
    crossed += r.crossed ? 1 : 0;
    raw.rows.push_back(std::to_string(i) + "," + std::to_string(r.seed) + "," +
                       format_real(theta) + "," + format_real(r.theta_hat) + "," +
                       format_real(r.tau) + "," + format_real(r.beta) + "," +
                       b(r.crossed) + "," + to_string(spec.form));
  }
  const Moments m = moments(values);
  McCell c;
  c.label = "H=" + format_real(H);
  c.level = H;
  c.n = m.n;
  c.mean = m.mean;
  c.bias = m.mean - theta;
  c.variance = m.variance;
  c.bound = xi / H;
  c.radius = spec.radius_se * std::sqrt(m.variance / static_cast<double>(m.n));
  c.crossing_fraction = static_cast<double>(crossed) / static_cast<double>(rows.size());
  c.statistic = std::abs(c.bias);
  return c;
}

bool well_defined(const McCell& c) {
  return c.n >= 2 && std::isfinite(c.mean) && std::isfinite(c.variance);
}

void run_sequential(const ExperimentSpec& spec, Execution execution, McReport& report) {
  const bool nonlinear = spec.kind == ExperimentKind::nonlinear_bias;
  const GMap g = spec.scenario.g_map == GMapKind::sqrt ? GMap::sqrt_map() : GMap::identity();
  const auto levels = sorted_levels(spec);
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const double H = levels[k];
    const ScenarioConfig base = cell_scenario(spec, H);
    auto kernel = [&](std::size_t i) {
      EstimatorRow row;
      row.seed = replicate_seed(base.seed, k, i);
      const SimulatedModel model = build_scenario(seeded(base, row.seed));
      SequentialResult r;
      if (nonlinear) {
        const NonlinearResult nl = nonlinear_sequential(model.X(), model.f(), model.a(), H, g, spec.form);
        r = nl.inner;
        row.theta_hat = nl.theta_hat;
      } else {
        r = sequential_ls(model.X(), model.f(), model.a(), H, spec.form);
        row.theta_hat = r.theta_hat;
      }
      row.crossed = r.crossed;
      row.tau = r.tau_H;
      row.beta = r.beta_H;
      return row;
    };
    const auto rows = map_replicates<EstimatorRow>(spec, execution, kernel);
    report.raw.emplace_back();
    McCell c = estimator_cell(spec, H, base.true_theta(), scenario_xi(base), rows,
                              report.raw.back());
    const bool all_crossed = c.crossing_fraction == 1.0;
    switch (spec.kind) {
      case ExperimentKind::unbiasedness:
        c.status = well_defined(c) && all_crossed && std::abs(c.bias) <= c.radius
                       ? CellStatus::pass : CellStatus::fail;
        break;
      case ExperimentKind::variance_bound:
        c.statistic = c.variance;
        c.status = well_defined(c) && all_crossed &&
                           c.variance <= spec.variance_slack * c.bound
                       ? CellStatus::pass : CellStatus::fail;
        break;
      default: {
        // |bias| must not grow beyond the combined confidence radii of
        // neighbouring cells.
        bool ok = well_defined(c) && all_crossed;
        if (ok && !report.cells.empty()) {
          const McCell& prev = report.cells.back();
          const double slack = std::hypot(prev.radius, c.radius);
          ok = std::abs(c.bias) < std::abs(prev.bias) ||
               std::abs(c.bias) - std::abs(prev.bias) <= slack;
        }
        c.status = ok ? CellStatus::pass : CellStatus::fail;
        break;
      }
    }
    report.cells.push_back(c);
  }
  if (nonlinear && report.cells.size() >= 2 &&
      !(std::abs(report.cells.back().bias) < std::abs(report.cells.front().bias))) {
    report.cells.back().status = CellStatus::fail;
    report.annotation = "bias at the largest H is not below the smallest-H bias";
  }
}

// ---- consistency

struct ConsistencyRow {
  std::uint64_t seed = 0;
  std::vector<double> estimates;
};

void run_consistency(const ExperimentSpec& spec, Execution execution, McReport& report) {
  const auto levels = sorted_levels(spec);
  const ScenarioConfig base = cell_scenario(spec, levels.back());
  const double theta = base.true_theta();

  bool violated = false;
  try {
    violated = !design_diverges(base) || !std::isfinite(slln_condition_eval(base, 2.0));
  } catch (const UnsupportedScenarioError&) {
    report.annotation = "condition-unverified: no closed form for this scenario";
  }
  if (violated) report.annotation = "condition-violated: F does not diverge or the condition integral is infinite";

  auto kernel = [&](std::size_t i) {
    ConsistencyRow row;
    row.seed = replicate_seed(base.seed, 0, i);
    const SimulatedModel model = build_scenario(seeded(base, row.seed));
    row.estimates = structural_ls(model.X(), model.f(), model.a(), levels);
    return row;
  };
  const auto rows = map_replicates<ConsistencyRow>(spec, execution, kernel);

  for (std::size_t k = 0; k < levels.size(); ++k) {
    RawTable raw;
    raw.header = kConsistencyHeader;
    std::vector<double> estimates, errors;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double est = rows[i].estimates[k];
      estimates.push_back(est);
      errors.push_back(std::abs(est - theta));
      raw.rows.push_back(std::to_string(i) + "," + std::to_string(rows[i].seed) + "," +
                         format_real(levels[k]) + "," + format_real(theta) + "," +
                         format_real(est) + "," + format_real(errors.back()));
    }
    const Moments m = moments(estimates);
    McCell c;
    c.label = "T=" + format_real(levels[k]);
    c.level = levels[k];
    c.n = m.n;
    c.mean = m.mean;
    c.bias = m.mean - theta;
    c.variance = m.variance;
    c.bound = 0.0;
    c.radius = spec.radius_se * std::sqrt(m.variance / static_cast<double>(m.n));
    c.statistic = median(errors);
    bool ok = std::isfinite(c.statistic);
    if (ok && !report.cells.empty()) ok = c.statistic < report.cells.back().statistic;
    c.status = violated ? CellStatus::condition_violated
                        : (ok ? CellStatus::pass : CellStatus::fail);
    report.cells.push_back(c);
    report.raw.push_back(std::move(raw));
  }
}

// ---- hypothesis error

struct HypothesisRow {
  std::optional<double> phi_h0;
  std::optional<double> phi_h1;
};

void run_hypothesis(const ExperimentSpec& spec, Execution execution, McReport& report) {
  const double xi = scenario_xi(spec.scenario);
  const double H = spec.H ? *spec.H : required_H(spec.delta, spec.epsilon, xi);
  const ScenarioConfig base = cell_scenario(spec, H);
  const double theta = base.true_theta();

  // One simulation serves both hypotheses: X under H0 and its noise M under H1.
  auto kernel = [&](std::size_t i) {
    const SimulatedModel model = build_scenario(seeded(base, replicate_seed(base.seed, 0, i)));
    HypothesisRow row;
    row.phi_h0 = phi_H(model.X(), model.f(), model.a(), H, spec.form);
    row.phi_h1 = phi_H(model.M, model.f(), model.a(), H, spec.form);
    return row;
  };
  const auto rows = map_replicates<HypothesisRow>(spec, execution, kernel);

  const double n = static_cast<double>(rows.size());
  const double bound = spec.epsilon + 3.0 * std::sqrt(spec.epsilon / n);
  for (int hyp = 0; hyp < 2; ++hyp) {
    RawTable raw;
    raw.header = kHypothesisHeader;
    const std::string name = hyp == 0 ? "H0" : "H1";
    const Decision wrong = hyp == 0 ? Decision::accept_h1 : Decision::accept_h0;
    std::vector<double> phis;
    std::size_t errors = 0, crossed = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& phi = hyp == 0 ? rows[i].phi_h0 : rows[i].phi_h1;
      std::string decision = "none";
      if (phi) {
        ++crossed;
        const Decision d = decide(*phi, spec.delta);
        decision = to_string(d);
        if (d == wrong) ++errors;
        phis.push_back(*phi);
      } else {
        ++errors;  // no verdict counts against the test
        phis.push_back(kNaN);
      }
      raw.rows.push_back(std::to_string(i) + "," + name + "," +
                         format_real(hyp == 0 ? theta : 0.0) + "," +
                         format_real(phi ? *phi : kNaN) + "," + decision + "," +
                         format_real(H) + "," + format_real(spec.delta) + "," +
                         format_real(spec.epsilon));
    }
    const Moments m = moments(phis);
    McCell c;
    c.label = name;
    c.level = H;
    c.n = m.n;
    c.mean = m.mean;
    c.bias = m.mean - (hyp == 0 ? theta : 0.0);
    c.variance = m.variance;
    c.bound = bound;
    c.radius = spec.radius_se * std::sqrt(m.variance / static_cast<double>(m.n));
    c.crossing_fraction = static_cast<double>(crossed) / n;
    c.statistic = static_cast<double>(errors) / n;
    c.status = c.statistic <= bound ? CellStatus::pass : CellStatus::fail;
    report.cells.push_back(c);
    report.raw.push_back(std::move(raw));
  }
}

// ---- Kronecker diagnostic on N = f∘M, A = F

struct KroneckerRow {
  std::uint64_t seed = 0;
  double tail = kNaN;
};

void run_kronecker(const ExperimentSpec& spec, Execution execution, McReport& report) {
  const ScenarioConfig& base = spec.scenario;
  const double t_from = spec.tail_start * base.horizon;
  auto kernel = [&](std::size_t i) {
    KroneckerRow row;
    row.seed = replicate_seed(base.seed, 0, i);
    const SimulatedModel model = build_scenario(seeded(base, row.seed));
    const LadlagPath* paths[] = {&model.M, &model.a().right().path(),
                                 &model.a().left().path()};
    const auto times = union_times(paths);
    const IncreasingPath A = F_process(model.f(), model.a(), times);
    const LadlagPath N = integral_path(model.f(), model.M, times);
    const auto tail = kronecker_tail_max(N, A, t_from);
    row.tail = tail ? *tail : kNaN;
    return row;
  };
  const auto rows = map_replicates<KroneckerRow>(spec, execution, kernel);

  RawTable raw;
  raw.header = kKroneckerHeader;
  std::vector<double> tails;
  std::size_t below = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const bool ok = rows[i].tail < spec.tolerance;
    below += ok ? 1 : 0;
    tails.push_back(rows[i].tail);
    raw.rows.push_back(std::to_string(i) + "," + std::to_string(rows[i].seed) + "," +
                       format_real(t_from) + "," + format_real(rows[i].tail) + "," + b(ok));
  }
  const Moments m = moments(tails);
  McCell c;
  c.label = "tail";
  c.level = t_from;
  c.n = m.n;
  c.mean = m.mean;
  c.bias = m.mean;
  c.variance = m.variance;
  c.bound = spec.tolerance;
  c.radius = spec.radius_se * std::sqrt(m.variance / static_cast<double>(m.n));
  c.statistic = static_cast<double>(below) / static_cast<double>(rows.size());
  c.status = c.statistic >= spec.pass_fraction ? CellStatus::pass : CellStatus::fail;
  report.cells.push_back(c);
  report.raw.push_back(std::move(raw));
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::unbiasedness: return "unbiasedness";
    case ExperimentKind::variance_bound: return "variance_bound";
    case ExperimentKind::consistency: return "consistency";
    case ExperimentKind::hypothesis_error: return "hypothesis_error";
    case ExperimentKind::nonlinear_bias: return "nonlinear_bias";
    case ExperimentKind::kronecker: return "kronecker";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::unbiasedness, ExperimentKind::variance_bound,
                 ExperimentKind::consistency, ExperimentKind::hypothesis_error,
                 ExperimentKind::nonlinear_bias, ExperimentKind::kronecker})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown experiment kind '" + s + "'");
}

std::string to_string(CellStatus s) {
  switch (s) {
    case CellStatus::pass: return "pass";
    case CellStatus::fail: return "fail";
    case CellStatus::condition_violated: return "condition-violated";
  }
  return "unknown";
}

void ExperimentSpec::validate() const {
  scenario.validate();
  if (replicates < 2) throw ConfigError("replicates must be at least 2");
  const bool needs_levels = kind != ExperimentKind::hypothesis_error &&
                            kind != ExperimentKind::kronecker;
  if (needs_levels && levels.empty()) throw ConfigError("levels must not be empty");
  std::set<double> seen;
  for (double v : levels) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("levels must be positive and finite");
    if (!seen.insert(v).second) throw ConfigError("levels must be distinct");
  }
  if (horizon_factor < 0.0 || !std::isfinite(horizon_factor))
    throw ConfigError("horizon_factor must be nonnegative");
  if (!(radius_se > 0.0)) throw ConfigError("radius_se must be positive");
  if (!(variance_slack > 0.0)) throw ConfigError("variance_slack must be positive");

  const bool nonlinear = scenario.kind == ScenarioKind::nonlinear;
  switch (kind) {
    case ExperimentKind::nonlinear_bias:
      if (!nonlinear) throw ConfigError("nonlinear_bias needs a nonlinear scenario");
      break;
    case ExperimentKind::kronecker:
      if (nonlinear) throw ConfigError("kronecker is not defined for a nonlinear scenario");
      if (!(tail_start > 0.0 && tail_start < 1.0)) throw ConfigError("tail_start must lie in (0, 1)");
      if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
      if (!(pass_fraction > 0.0 && pass_fraction <= 1.0))
        throw ConfigError("pass_fraction must lie in (0, 1]");
      break;
    case ExperimentKind::hypothesis_error:
      if (nonlinear) throw ConfigError("hypothesis_error needs a linear scenario");
      if (!(delta > 0.0)) throw ConfigError("delta must be positive");
      if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
      if (H && !(*H > 0.0)) throw ConfigError("H must be positive");
      break;
    default:
      if (nonlinear)
        throw ConfigError(to_string(kind) + " needs a linear scenario; use nonlinear_bias");
      break;
  }
}

ExperimentSpec experiment_from_json(const nlohmann::json& j, bool* seed_present) {
  try {
    if (!j.is_object() || !j.contains("scenario") || !j.contains("experiment"))
      throw ConfigError("config needs \"scenario\" and \"experiment\" objects");
    for (const auto& [key, _] : j.items())
      if (key != "scenario" && key != "experiment")
        throw ConfigError("unknown top-level key '" + key + "'");
    ExperimentSpec s;
    s.scenario = scenario_from_json(j.at("scenario"), seed_present);
    const auto& e = j.at("experiment");
    static const std::set<std::string> known = {
        "kind", "replicates", "levels", "form", "horizon_factor", "cell_steps",
        "delta", "epsilon", "H", "tail_start", "tolerance", "pass_fraction",
        "variance_slack", "radius_se", "threads"};
    for (const auto& [key, _] : e.items())
      if (!known.count(key)) throw ConfigError("unknown experiment key '" + key + "'");
    if (!e.contains("kind")) throw ConfigError("experiment.kind is required");
    s.kind = experiment_kind_from_string(e.at("kind").get<std::string>());
    s.replicates = get_or<std::size_t>(e, "replicates", s.replicates);
    s.levels = get_or<std::vector<double>>(e, "levels", {});
    if (e.contains("form")) s.form = estimator_form_from_string(e.at("form").get<std::string>());
    s.horizon_factor = get_or(e, "horizon_factor", s.horizon_factor);
    s.cell_steps = get_or<std::size_t>(e, "cell_steps", s.cell_steps);
    s.delta = get_or(e, "delta", s.delta);
    s.epsilon = get_or(e, "epsilon", s.epsilon);
    if (e.contains("H")) s.H = e.at("H").get<double>();
    s.tail_start = get_or(e, "tail_start", s.tail_start);
    s.tolerance = get_or(e, "tolerance", s.tolerance);
    s.pass_fraction = get_or(e, "pass_fraction", s.pass_fraction);
    s.variance_slack = get_or(e, "variance_slack", s.variance_slack);
    s.radius_se = get_or(e, "radius_se", s.radius_se);
    s.threads = get_or(e, "threads", s.threads);
    return s;
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("malformed experiment config: ") + ex.what());
  }
}

std::uint64_t replicate_seed(std::uint64_t master, std::size_t cell, std::size_t i) {
  return derive_seed(derive_seed(master, cell), i);
}

ScenarioConfig cell_scenario(const ExperimentSpec& spec, double level) {
  ScenarioConfig c = spec.scenario;
  if (spec.kind == ExperimentKind::consistency) {
    c.horizon = level;
  } else if (spec.horizon_factor > 0.0) {
    c.horizon = spec.horizon_factor * level;
  }
  if (spec.cell_steps > 0) c.step = c.horizon / static_cast<double>(spec.cell_steps);
  c.validate();
  return c;
}

McReport run_experiment(const ExperimentSpec& spec, Execution execution) {
  spec.validate();
  McReport report;
  report.kind = spec.kind;
  switch (spec.kind) {
    case ExperimentKind::unbiasedness:
    case ExperimentKind::variance_bound:
    case ExperimentKind::nonlinear_bias:
      run_sequential(spec, execution, report);
      break;
    case ExperimentKind::consistency:
      run_consistency(spec, execution, report);
      break;
    case ExperimentKind::hypothesis_error:
      run_hypothesis(spec, execution, report);
      break;
    case ExperimentKind::kronecker:
      run_kronecker(spec, execution, report);
      break;
  }
  report.overall = CellStatus::pass;
  for (const McCell& c : report.cells) {
    if (c.status == CellStatus::fail) report.overall = CellStatus::fail;
    else if (c.status == CellStatus::condition_violated && report.overall == CellStatus::pass)
      report.overall = CellStatus::condition_violated;
  }
  return report;
}

std::string report_csv(const McReport& report) {
  std::ostringstream out;
  out << "experiment,cell,level,n,mean,bias,variance,bound,radius,crossing_fraction,"
         "statistic,status\n";
  const std::string kind = to_string(report.kind);
  for (const McCell& c : report.cells) {
    out << kind << ',' << c.label << ',' << format_real(c.level) << ',' << c.n << ','
        << format_real(c.mean) << ',' << format_real(c.bias) << ','
        << format_real(c.variance) << ',' << format_real(c.bound) << ','
        << format_real(c.radius) << ',' << format_real(c.crossing_fraction) << ','
        << format_real(c.statistic) << ',' << to_string(c.status) << '\n';
  }
  out << kind << ",overall,,,,,,,,,," << to_string(report.overall) << '\n';
  return out.str();
}

std::string raw_csv(const RawTable& table) {
  std::string s = table.header + "\n";
  for (const auto& row : table.rows) s += row + "\n";
  return s;
}

void write_report_files(const McReport& report, const std::filesystem::path& out) {
  auto write = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot open " + p.string() + " for writing");
    f << text;
  };
  write(out, report_csv(report));
  const auto dir = out.parent_path();
  const auto stem = out.stem().string();
  for (std::size_t k = 0; k < report.raw.size(); ++k)
    write(dir / (stem + ".cell" + std::to_string(k) + ".raw.csv"), raw_csv(report.raw[k]));
}

}  // namespace optreg
