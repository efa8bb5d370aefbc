#include "promptevo/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "promptevo/errors.hpp"

namespace promptevo {

namespace {

using nlohmann::json;

// Collects issues instead of throwing on the first one.
class Reader {
public:
  explicit Reader(const json& raw) : raw_(raw) {}

  std::vector<std::string> issues;

  bool has(const char* key) const { return raw_.is_object() && raw_.contains(key) && !raw_[key].is_null(); }

  template <typename T>
  void read(const char* key, T& out) {
    if (!has(key)) {
      return;
    }
    const json& v = raw_[key];
    if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) {
        issues.push_back(std::string(key) + " must be a string");
        return;
      }
    } else if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) {
        issues.push_back(std::string(key) + " must be a number");
        return;
      }
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) {
        issues.push_back(std::string(key) + " must be an integer");
        return;
      }
      if (v.is_number_unsigned() || v.get<std::int64_t>() >= 0) {
        out = v.get<T>();
      } else {
        issues.push_back(std::string(key) + " must be >= 0");
      }
      return;
    }
    out = v.get<T>();
  }

  const json& raw() const { return raw_; }

private:
  const json& raw_;
};

std::optional<std::vector<double>> read_vector(const json& v, const std::string& what,
                                               std::vector<std::string>& issues) {
  if (!v.is_array()) {
    issues.push_back(what + " must be a list of numbers");
    return std::nullopt;
  }
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) {
      issues.push_back(what + " must be a list of numbers");
      return std::nullopt;
    }
    out.push_back(x.get<double>());
  }
  return out;
}

WorkerEndpoint parse_worker(const json& v, std::vector<std::string>& issues) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "builtin" || s == "builtin-testbed") {
      return BuiltinWorker{};
    }
    issues.push_back("worker: unknown worker kind '" + s + "'");
    return BuiltinWorker{};
  }
  if (v.is_object()) {
    if (v.contains("command")) {
      if (!v["command"].is_string() || v["command"].get<std::string>().empty()) {
        issues.push_back("worker.command must be a non-empty string");
        return BuiltinWorker{};
      }
      return CommandWorker{v["command"].get<std::string>()};
    }
    if (v.contains("address")) {
      const auto addr = v["address"].is_string() ? v["address"].get<std::string>() : std::string{};
      const auto colon = addr.rfind(':');
      if (colon == std::string::npos || colon == 0) {
        issues.push_back("worker.address must be host:port");
        return BuiltinWorker{};
      }
      char* end = nullptr;
      const long port = std::strtol(addr.c_str() + colon + 1, &end, 10);
      if (*end != '\0' || port <= 0 || port > 65535) {
        issues.push_back("worker.address has an invalid port");
        return BuiltinWorker{};
      }
      return NetworkWorker{addr.substr(0, colon), static_cast<std::uint16_t>(port)};
    }
    if (v.value("type", std::string{}) == "builtin") {
      return BuiltinWorker{};
    }
  }
  issues.push_back("worker must be \"builtin\", {\"command\": ...} or {\"address\": \"host:port\"}");
  return BuiltinWorker{};
}

testbed::TestbedSpec parse_testbed(const json& raw, std::size_t q, std::vector<std::string>& issues) {
  std::size_t dim = 0;
  if (raw.is_object() && raw.contains("dim")) {
    if (raw["dim"].is_number_integer() && raw["dim"].get<std::int64_t>() >= 1) {
      dim = raw["dim"].get<std::size_t>();
    } else {
      issues.push_back("testbed.dim must be a positive integer");
    }
  }
  if (q == 0) {
    return {};
  }
  if (dim != 0 && dim < q && q >= 3 && !(raw.is_object() && raw.contains("centers"))) {
    issues.push_back("testbed.dim must be >= Q for the default centers");
    return {};
  }
  auto spec = testbed::default_spec(q, dim);
  if (!raw.is_object()) {
    if (!raw.is_null()) {
      issues.push_back("testbed must be an object");
    }
    return spec;
  }
  if (raw.contains("sigma")) {
    if (raw["sigma"].is_number()) {
      spec.sigma = raw["sigma"].get<double>();
    } else {
      issues.push_back("testbed.sigma must be a number");
    }
  }
  if (raw.contains("centers")) {
    if (!raw["centers"].is_array()) {
      issues.push_back("testbed.centers must be a list of points");
    } else {
      spec.centers.clear();
      for (const auto& c : raw["centers"]) {
        if (auto v = read_vector(c, "testbed.centers[]", issues)) {
          spec.centers.push_back(std::move(*v));
        }
      }
      if (spec.centers.size() != q) {
        issues.push_back("testbed.centers must have one center per label (Q = " + std::to_string(q) + ")");
      }
      if (!raw.contains("dim") && !spec.centers.empty()) {
        spec.dim = spec.centers.front().size();
      }
      if (!raw.contains("prompt_anchor")) {
        spec.prompt_anchor = testbed::default_anchor(spec.centers);
      }
    }
  }
  if (raw.contains("prompt_anchor")) {
    if (auto v = read_vector(raw["prompt_anchor"], "testbed.prompt_anchor", issues)) {
      spec.prompt_anchor = std::move(*v);
    }
  }
  for (auto& issue : spec.validate()) {
    issues.push_back("testbed: " + issue);
  }
  return spec;
}

} // namespace

RunConfig validate_config(const json& raw) {
  RunConfig cfg;
  if (!raw.is_object()) {
    throw ConfigError("configuration must be a JSON object");
  }
  Reader r(raw);

  if (r.has("schema")) {
    if (!raw["schema"].is_number_integer() || raw["schema"].get<int>() != RunConfig::schema_version) {
      r.issues.push_back("schema must be 1");
    }
  }
  if (!r.has("prompt")) {
    r.issues.push_back("prompt is required");
  } else {
    r.read("prompt", cfg.prompt);
    if (cfg.prompt.empty() && raw["prompt"].is_string()) {
      r.issues.push_back("prompt must be non-empty");
    }
  }
  if (r.has("labels")) {
    const auto& labels = raw["labels"];
    if (!labels.is_array()) {
      r.issues.push_back("labels must be a list of strings");
    } else {
      for (const auto& l : labels) {
        if (l.is_string()) {
          cfg.labels.push_back(l.get<std::string>());
        } else {
          r.issues.push_back("labels must be a list of strings");
          break;
        }
      }
    }
  }
  if (cfg.labels.empty()) {
    r.issues.push_back("Q >= 1 required (labels must be non-empty)");
  }
  const std::size_t q = cfg.labels.size();

  r.read("mu", cfg.mu);
  r.read("lambda", cfg.lambda);
  r.read("max_generations", cfg.max_generations);
  r.read("tau", cfg.tau);
  r.read("bound", cfg.bound);
  r.read("run_seed", cfg.run_seed);
  r.read("hv_mc_samples", cfg.hv_mc_samples);
  r.read("mutation_strength", cfg.mutation_strength);
  r.read("tournament_size", cfg.tournament_size);
  r.read("retries", cfg.retries);
  if (r.has("timeouts")) {
    const auto& t = raw["timeouts"];
    if (!t.is_object()) {
      r.issues.push_back("timeouts must be an object");
    } else {
      Reader tr(t);
      tr.read("handshake_s", cfg.handshake_timeout_s);
      tr.read("call_s", cfg.call_timeout_s);
      for (auto& i : tr.issues) r.issues.push_back("timeouts." + i);
    }
  }

  if (cfg.mu < 2) r.issues.push_back("mu must be >= 2");
  if (cfg.mu > 999999) r.issues.push_back("mu must be <= 999999");
  if (cfg.lambda < 1) r.issues.push_back("lambda must be >= 1");
  if (cfg.lambda > 999999) r.issues.push_back("lambda must be <= 999999");
  if (cfg.max_generations > 9999) r.issues.push_back("max_generations must be <= 9999");
  if (!(cfg.tau > 0.0) || !std::isfinite(cfg.tau)) r.issues.push_back("tau must be > 0");
  if (!(cfg.bound > 0.0) || !std::isfinite(cfg.bound)) r.issues.push_back("bound must be > 0");
  if (cfg.hv_mc_samples < 1000) r.issues.push_back("hv_mc_samples must be >= 1000");
  if (!(cfg.mutation_strength >= 0.0 && cfg.mutation_strength <= 1.0)) {
    r.issues.push_back("mutation_strength must be in [0, 1]");
  }
  if (cfg.tournament_size < 2) r.issues.push_back("tournament_size must be >= 2");
  if (!(cfg.handshake_timeout_s > 0.0)) r.issues.push_back("timeouts.handshake_s must be > 0");
  if (!(cfg.call_timeout_s > 0.0)) r.issues.push_back("timeouts.call_s must be > 0");

  if (r.has("worker")) {
    cfg.worker = parse_worker(raw["worker"], r.issues);
  }

  if (r.has("hv_reference")) {
    if (auto v = read_vector(raw["hv_reference"], "hv_reference", r.issues)) {
      cfg.hv_reference = std::move(*v);
      if (q != 0 && cfg.hv_reference.size() != q) {
        r.issues.push_back("hv_reference must have Q = " + std::to_string(q) + " entries");
      }
    }
  } else {
    cfg.hv_reference.assign(q, 0.0);
  }

  cfg.testbed = parse_testbed(r.has("testbed") ? raw["testbed"] : json(), q, r.issues);
  cfg.testbed.strength = cfg.mutation_strength;

  if (!r.issues.empty()) {
    throw ConfigError(std::move(r.issues));
  }
  return cfg;
}

json to_json(const RunConfig& c) {
  json j;
  j["schema"] = RunConfig::schema_version;
  j["prompt"] = c.prompt;
  j["labels"] = c.labels;
  j["mu"] = c.mu;
  j["lambda"] = c.lambda;
  j["max_generations"] = c.max_generations;
  j["tau"] = c.tau;
  j["bound"] = c.bound;
  j["run_seed"] = c.run_seed;
  std::visit(
      [&](const auto& w) {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, BuiltinWorker>) {
          j["worker"] = "builtin";
        } else if constexpr (std::is_same_v<W, CommandWorker>) {
          j["worker"] = {{"command", w.command}};
        } else {
          j["worker"] = {{"address", w.host + ":" + std::to_string(w.port)}};
        }
      },
      c.worker);
  j["hv_reference"] = c.hv_reference;
  j["hv_mc_samples"] = c.hv_mc_samples;
  j["mutation_strength"] = c.mutation_strength;
  j["tournament_size"] = c.tournament_size;
  j["retries"] = c.retries;
  j["timeouts"] = {{"handshake_s", c.handshake_timeout_s}, {"call_s", c.call_timeout_s}};
  j["testbed"] = {{"dim", c.testbed.dim},
                  {"sigma", c.testbed.sigma},
                  {"centers", c.testbed.centers},
                  {"prompt_anchor", c.testbed.prompt_anchor}};
  return j;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  json raw;
  try {
    raw = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("cannot parse config file " + path + ": " + e.what());
  }
  return validate_config(raw);
}

void apply_worker_override(RunConfig& config) {
  const char* env = std::getenv("PROMPTEVO_WORKER");
  if (env == nullptr || *env == '\0') return;
  const std::string value = env;
  if (value == "builtin") {
    config.worker = BuiltinWorker{};
  } else if (value.rfind("tcp://", 0) == 0) {
    std::vector<std::string> issues;
    const auto worker = parse_worker(json{{"address", value.substr(6)}}, issues);
    if (!issues.empty()) {
      throw ConfigError("PROMPTEVO_WORKER: " + issues.front());
    }
    config.worker = worker;
  } else {
    config.worker = CommandWorker{value};
  }
}

std::string describe(const WorkerEndpoint& worker) {
  return std::visit(
      [](const auto& w) -> std::string {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, BuiltinWorker>) {
          return "builtin testbed";
        } else if constexpr (std::is_same_v<W, CommandWorker>) {
          return "command '" + w.command + "'";
        } else {
          return "tcp " + w.host + ":" + std::to_string(w.port);
        }
      },
      worker);
}

ConfigError::ConfigError(std::vector<std::string> issues)
    : Error([&] {
        std::ostringstream os;
        os << "invalid configuration";
        for (const auto& i : issues) {
          os << "\n  - " << i;
        }
        return os.str();
      }()),
      issues_(std::move(issues)) {}

} // namespace promptevo
