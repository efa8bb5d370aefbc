#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "promptevo/config.hpp"
#include "promptevo/contracts.hpp"
#include "promptevo/engine.hpp"
#include "promptevo/run_io.hpp"

namespace promptevo {

// Process exit codes. Scripts depend on these values.
enum ExitCode : int {
  exit_ok = 0,
  exit_config_error = 1,
  exit_worker_error = 2,
  exit_io_error = 3,
  exit_verify_failed = 4,
};

// Brute-force baseline: `samples` independent draws from P(x | prompt), never
// mutated, evaluated against the run prompt. Prompts for generation cycle
// through `alt_prompts` when given. Rows are emitted at the same evaluation
// budgets as an evolve run (mu, mu + lambda, ...) plus a final row when
// `samples` is not on that grid; feasible_count is cumulative.
struct BaselineResult {
  std::vector<Candidate> archive;
  std::size_t evaluations = 0;
};
BaselineResult run_baseline(const RunConfig& config, Worker& worker, RunWriter* writer, std::size_t samples,
                            const std::vector<std::string>& alt_prompts, int jobs = 1);

struct EvolveArgs {
  std::string config_path;
  std::string out_dir;
  int jobs = 1;
};
int cmd_evolve(const EvolveArgs& args, std::ostream& out, std::ostream& err);

struct BaselineArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::size_t> samples; // default: the config's evaluation budget
  std::optional<std::string> alt_prompts_path;
  int jobs = 1;
};
int cmd_baseline(const BaselineArgs& args, std::ostream& out, std::ostream& err);

struct HvArgs {
  std::string front_path; // archive.json or CSV of objective vectors
  std::optional<std::vector<double>> reference;
  std::uint64_t mc_samples = 100000;
  std::uint64_t seed = 0;
};
int cmd_hv(const HvArgs& args, std::ostream& out, std::ostream& err);

// Objective vectors from an archive.json or a CSV (one vector per line,
// non-numeric lines skipped).
[[nodiscard]] std::vector<Point> read_front_file(const std::string& path);

// Hypervolume-vs-evaluations curve of one run.
struct RunSeries {
  std::string method;
  std::uint64_t seed = 0;
  std::size_t num_objectives = 0;
  std::vector<std::pair<std::size_t, double>> curve; // (evaluations, hypervolume)
};

struct MethodSummary {
  std::string method;
  std::size_t runs = 0;
  std::size_t final_budget = 0;
  double median_final_hv = 0.0;
};

struct ReportSummary {
  std::vector<MethodSummary> methods;
  std::size_t total_budget = 0;
  // First budget (on the evolve grid) where the median evolve HV exceeds the
  // median baseline HV; set only when both methods are present.
  std::optional<std::size_t> crossover_budget;
  bool both_methods = false;
};

[[nodiscard]] RunSeries series_from_run(const LoadedRun& run);
// Step-function value of a curve at a budget (0 before its first point).
[[nodiscard]] double hv_at(const RunSeries& series, std::size_t evaluations);
// Throws UsageError when runs disagree on Q or the list is empty.
[[nodiscard]] ReportSummary summarize_runs(const std::vector<RunSeries>& runs);
[[nodiscard]] std::string format_summary(const ReportSummary& summary);

struct ReportArgs {
  std::vector<std::string> run_dirs;
  std::optional<std::string> csv_path; // combined CSV; stdout when absent
};
int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err);

// Recomputes every metrics row and archive transition from the snapshots.
// Returns human-readable discrepancies; empty means the run verifies.
[[nodiscard]] std::vector<std::string> verify_run(const std::string& run_dir);
int cmd_verify(const std::string& run_dir, std::ostream& out, std::ostream& err);

} // namespace promptevo
