#pragma once

// Seeded Monte Carlo experiments over simulated scenarios.
//
// Replicate i of cell k runs on seed derive_seed(derive_seed(master, k), i),
// so a report depends only on (spec, master seed) and never on thread count
// or scheduling. Aggregation always walks replicates in index order.
//
// Config schema (JSON):
//
//   {
//     "scenario":   { ...see scenario.hpp... },
//     "experiment": {
//       "kind":           "unbiasedness" | "variance_bound" | "consistency" |
//                         "hypothesis_error" | "nonlinear_bias" | "kronecker",
//       "replicates":     n (>= 2),
//       "levels":         [H...] or [T...] for consistency,
//       "form":           "corrected" | "literal",
//       "horizon_factor": per-cell horizon = factor * level (0 keeps the scenario's),
//       "cell_steps":     per-cell grid step = horizon / cell_steps (0 keeps it),
//       "delta", "epsilon", "H":           hypothesis_error (H defaults to 4ξ/(δ²ε)),
//       "tail_start", "tolerance", "pass_fraction":   kronecker,
//       "variance_slack": multiplier on ξ/H for variance_bound (1.1),
//       "radius_se":      standard errors per confidence radius (4),
//       "threads":        OpenMP team size (0 = default)
//     }
//   }

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "optreg/estimators.hpp"
#include "optreg/scenario.hpp"

namespace optreg {

enum class ExperimentKind {
  unbiasedness,
  variance_bound,
  consistency,
  hypothesis_error,
  nonlinear_bias,
  kronecker
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct ExperimentSpec {
  ScenarioConfig scenario;
  ExperimentKind kind = ExperimentKind::unbiasedness;
  std::size_t replicates = 1000;
  std::vector<double> levels;
  EstimatorForm form = EstimatorForm::corrected;
  double horizon_factor = 0.0;
  std::size_t cell_steps = 0;
  double delta = 1.0;
  double epsilon = 0.05;
  std::optional<double> H;
  double tail_start = 0.9;
  double tolerance = 0.05;
  double pass_fraction = 0.95;
  double variance_slack = 1.1;
  double radius_se = 4.0;
  int threads = 0;

  /// Throws ConfigError on invalid values or scenario/experiment mismatch.
  void validate() const;
};

ExperimentSpec experiment_from_json(const nlohmann::json& j,
                                    bool* seed_present = nullptr);

enum class CellStatus { pass, fail, condition_violated };
std::string to_string(CellStatus s);

/// Aggregate of one cell (one H, one T, or one hypothesis).
struct McCell {
  std::string label;
  double level = 0.0;           // H, T, or tail start
  std::size_t n = 0;            // replicates that produced a value
  double mean = 0.0;
  double bias = 0.0;
  double variance = 0.0;        // sample variance (n - 1 denominator)
  double bound = 0.0;           // ξ/H, ε + 3√(ε/n), or the tolerance in use
  double radius = 0.0;          // radius_se · √(variance / n)
  double crossing_fraction = 1.0;
  double statistic = 0.0;       // median error, error rate, or pass fraction
  CellStatus status = CellStatus::pass;
};

struct RawTable {
  std::string header;
  std::vector<std::string> rows;
};

struct McReport {
  ExperimentKind kind = ExperimentKind::unbiasedness;
  std::vector<McCell> cells;
  std::vector<RawTable> raw;  // one table per cell
  CellStatus overall = CellStatus::pass;
  std::string annotation;

  bool passed() const { return overall != CellStatus::fail; }
};

enum class Execution { serial, parallel };

McReport run_experiment(const ExperimentSpec& spec,
                        Execution execution = Execution::parallel);

std::string report_csv(const McReport& report);
std::string raw_csv(const RawTable& table);

/// Writes the report to `out` and every raw table next to it as
/// `<stem>.cell<k>.raw.csv`.
void write_report_files(const McReport& report, const std::filesystem::path& out);

/// Scenario used for cell `level` after the per-cell horizon/step overrides.
ScenarioConfig cell_scenario(const ExperimentSpec& spec, double level);

/// Seed of replicate i in cell k.
std::uint64_t replicate_seed(std::uint64_t master, std::size_t cell, std::size_t i);

}  // namespace optreg
