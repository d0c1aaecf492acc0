#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "genou/genou_sim.hpp"
#include "genou/levy_models.hpp"
#include "genou/plots.hpp"
#include "genou/theory_constants.hpp"

namespace genou {

struct Tolerances {
  double z = 3.0;               // identity checks and cross-checks, in combined SEs
  double tail_q = 0.995;        // quantile for tail ratios
  double tail_ratio_rel = 0.25; // relative tolerance of tail ratios
  double hill_rel = 0.2;        // relative tolerance of Hill estimates
  double theta_q = 0.999;       // threshold quantile for extremal index estimates
  long block_len = 100;         // block length / run gap for extremal index estimates
  double ks = 0.05;
  double slope = 0.12;          // rate regression slopes
  double skew = 0.2;
  double kurtosis = 0.5;
  double stable_slope = 0.1;    // integrated-process scaling slope (stable regime)
};

inline const std::vector<std::string> kTaskNames = {
    "simulate", "constants", "verify_identities", "tails", "extremes", "acf_rates", "integrated_limit"};

struct ExperimentConfig {
  LevyModel model = Nelson{};
  double h = 1.0;
  std::vector<long> sizes = {1000, 10000, 100000};  // n-grid of replication tasks
  long series_length = 0;  // skeleton length for simulate/tails/extremes; 0 uses max(sizes)
  long reps = 200;
  std::uint64_t seed = 1;
  std::vector<std::string> tasks;
  std::string output_dir = "results";
  unsigned workers = 1;
  int subgrid = kDefaultSubgrid;
  long n_paths = 20000;
  double dt = 1.0 / 32;
  bool plots = false;
  Tolerances tolerances;
};

/// Parses a JSON document. Malformed text raises ParseError with line and
/// column; unknown keys and out-of-range values raise one ValidationError
/// listing every problem.
ExperimentConfig parse_config(const std::string& document);
/// Canonical JSON with every default filled in.
std::string serialize_config(const ExperimentConfig& config);
bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);
long effective_series_length(const ExperimentConfig& config);

struct ReportRow {
  std::string task;
  std::string target_name;
  double theory_value = 0.0;
  double empirical_value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string anchor;  // result under test, or "plumbing"
};

struct ExperimentReport {
  std::uint64_t seed = 0;
  std::vector<ReportRow> rows;
  std::vector<TheoryConstant> constants;
  std::optional<SkeletonSeries> series;
  PlotArtifacts artifacts;
  bool failed = false;  // a task raised; the report is partial

  bool all_pass() const;
};

/// Runs the tasks in order. If a task throws, the partial report (with a
/// FAILED row) is returned through `partial` and the error is rethrown with
/// the task name prepended.
ExperimentReport run_experiment(const ExperimentConfig& config, ExperimentReport* partial = nullptr);

std::string report_csv(const ExperimentReport& report);
std::string constants_csv(const ExperimentReport& report);

/// Writes report.csv, constants.csv, config.json and (if present) series.csv
/// atomically into dir; returns the paths written.
std::vector<std::string> write_report(const ExperimentReport& report, const ExperimentConfig& config,
                                      const std::string& dir);

/// SVG files for the report's plot artifacts: one Hill plot per tail estimate,
/// one regression per (statistic, lag), one CDF overlay per maxima sample.
/// An empty report writes nothing. Rows whose artifact is missing raise
/// MissingArtifact.
std::vector<std::string> emit_plots(const ExperimentReport& report, const std::string& dir);

}  // namespace genou
