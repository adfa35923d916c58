#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "qmetro/config.hpp"
#include "qmetro/csv.hpp"

namespace qmetro {

/// Invariant-check tallies gathered over every computation of a run.
struct RunCounters {
  double max_trace_drift = 0.0;
  double max_hermiticity_drift = 0.0;
  double min_eigenvalue = 1.0;
  std::size_t renormalizations = 0;
  std::size_t propagators = 0;
  std::size_t clamped_qfi = 0;
  std::size_t richardson_failures = 0;
  double max_richardson_discrepancy = 0.0;
  std::size_t cross_checks = 0;
  std::size_t cross_check_failures = 0;
  std::size_t rank_warnings = 0;
  std::size_t refinement_warnings = 0;
  std::size_t unsaturated_backflow = 0;
  std::size_t linear_response = 0;  // steady derivatives that used linear response

  void add(const TrajectoryStats& s);
  void merge(const RunCounters& o);
};

struct RunResult {
  Table table;
  RunCounters counters;
  std::size_t points = 0;  // parameter points evaluated
};

/// Runs the configured experiment (all sweep points, `threads` workers).
/// Rows follow the configuration's value order whatever the thread count.
RunResult run_experiment(const ExperimentConfig& c, unsigned threads = 1);

std::string summary_json(const ExperimentConfig& c, const RunResult& r, double wall_seconds,
                         unsigned threads);

/// `out.csv` -> `out.summary.json`.
std::string summary_path(const std::string& csv_path);

struct RunOutcome {
  std::string csv_path;
  std::string summary_path;
  RunResult result;
  double wall_seconds = 0.0;
};

/// run_experiment followed by the CSV and summary files. Nothing is left on
/// disk when the run fails.
RunOutcome run_and_write(const ExperimentConfig& c, unsigned threads,
                         const std::optional<std::string>& output = std::nullopt);

/// --threads value if given, else QMETRO_THREADS, else 1.
unsigned resolve_threads(std::optional<long> flag);

/// 0 success, 2 configuration, 3 numerical or invariant failure, 4 internal.
int exit_code(ErrorCode code);

}  // namespace qmetro
