#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "promptevo/testbed.hpp"

namespace promptevo {

struct BuiltinWorker {
  friend bool operator==(const BuiltinWorker&, const BuiltinWorker&) = default;
};
// Shell command speaking the line protocol on stdin/stdout.
struct CommandWorker {
  std::string command;
  friend bool operator==(const CommandWorker&, const CommandWorker&) = default;
};
struct NetworkWorker {
  std::string host;
  std::uint16_t port = 0;
  friend bool operator==(const NetworkWorker&, const NetworkWorker&) = default;
};
using WorkerEndpoint = std::variant<BuiltinWorker, CommandWorker, NetworkWorker>;

struct RunConfig {
  static constexpr int schema_version = 1;

  std::string prompt;
  std::vector<std::string> labels;
  std::size_t mu = 30;
  std::size_t lambda = 30;
  std::size_t max_generations = 20;
  double tau = 1.0;
  double bound = 0.35;
  std::uint64_t run_seed = 0;
  WorkerEndpoint worker = BuiltinWorker{};
  std::vector<double> hv_reference; // defaults to Q zeros
  std::size_t hv_mc_samples = 100000;
  double mutation_strength = 0.6;
  std::size_t tournament_size = 2;
  std::size_t retries = 2;
  double handshake_timeout_s = 10.0;
  double call_timeout_s = 120.0;
  testbed::TestbedSpec testbed; // used only by the builtin worker

  [[nodiscard]] std::size_t num_objectives() const noexcept { return labels.size(); }
  [[nodiscard]] std::size_t evaluation_budget() const noexcept { return mu + lambda * max_generations; }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Applies defaults and checks every invariant. Throws ConfigError listing all
// violations at once.
[[nodiscard]] RunConfig validate_config(const nlohmann::json& raw);

// Fully explicit record; validate_config(to_json(c)) == c.
[[nodiscard]] nlohmann::json to_json(const RunConfig& config);

[[nodiscard]] RunConfig load_config(const std::string& path);

// PROMPTEVO_WORKER, when set and non-empty, replaces the configured worker:
// "builtin", "tcp://host:port", or any other value as a shell command.
void apply_worker_override(RunConfig& config);

[[nodiscard]] std::string describe(const WorkerEndpoint& worker);

} // namespace promptevo
