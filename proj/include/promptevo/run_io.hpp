#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "promptevo/config.hpp"
#include "promptevo/engine.hpp"
#include "promptevo/metrics.hpp"
#include "promptevo/types.hpp"

namespace promptevo {

// Run directory layout:
//   config.json                 effective configuration (loadable with --config)
//   run.json                    run id, method and method-specific settings
//   metrics.csv                 one row per generation / budget checkpoint
//   generations/gen_NNNN.json   snapshot: evaluated, population, archive
//   archive.json                final (or latest) feasible non-dominated archive
namespace run_files {
inline constexpr const char* config = "config.json";
inline constexpr const char* run = "run.json";
inline constexpr const char* metrics = "metrics.csv";
inline constexpr const char* archive = "archive.json";
inline constexpr const char* generations = "generations";
} // namespace run_files

[[nodiscard]] nlohmann::json to_json(const Candidate& c);
[[nodiscard]] Candidate candidate_from_json(const nlohmann::json& j);

struct RunInfo {
  std::string run_id;
  std::string method; // "evolve" or "baseline"
  std::size_t jobs = 1;
  std::optional<std::size_t> samples;        // baseline only
  std::vector<std::string> alt_prompts;      // baseline only
};

[[nodiscard]] nlohmann::json to_json(const RunInfo& info);
[[nodiscard]] RunInfo run_info_from_json(const nlohmann::json& j);

struct Snapshot {
  std::size_t generation = 0;
  std::size_t evaluations_used = 0;
  std::vector<Candidate> evaluated;
  std::vector<Candidate> population;
  std::vector<Candidate> archive;
};

[[nodiscard]] std::string snapshot_file_name(std::size_t index);

// Writes a run directory incrementally: every on_generation() appends a
// metrics row, writes its snapshot and rewrites archive.json, so a run that
// aborts keeps everything up to the last completed generation.
class RunWriter final : public RunSink {
public:
  RunWriter(std::filesystem::path dir, const RunConfig& config, const RunInfo& info);

  void on_generation(const EvolutionState& state, const MetricsRow& row) override;
  void write(const Snapshot& snapshot, const MetricsRow& row);

  [[nodiscard]] const std::filesystem::path& dir() const noexcept { return dir_; }

private:
  std::filesystem::path dir_;
  RunInfo info_;
  std::vector<std::string> labels_;
  std::ofstream metrics_;
};

struct LoadedRun {
  std::filesystem::path dir;
  RunConfig config;
  RunInfo info;
  std::vector<std::string> metrics_lines; // without header
  std::vector<MetricsRow> metrics;
};

// Throws IoError on missing/malformed files.
[[nodiscard]] LoadedRun load_run(const std::filesystem::path& dir);
[[nodiscard]] Snapshot load_snapshot(const std::filesystem::path& dir, std::size_t index);
[[nodiscard]] std::vector<Candidate> load_archive(const std::filesystem::path& file);

void write_text_file(const std::filesystem::path& file, const std::string& text);
[[nodiscard]] nlohmann::json read_json_file(const std::filesystem::path& file);

} // namespace promptevo
