#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "promptevo/commands.hpp"
#include "promptevo/config.hpp"
#include "promptevo/errors.hpp"
#include "promptevo/worker_server.hpp"

using namespace promptevo;

namespace {

std::vector<double> parse_reference(const std::string& text) {
  std::vector<double> ref;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto cell = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || *end != '\0') {
      throw ConfigError("--ref expects comma-separated numbers, got '" + text + "'");
    }
    ref.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return ref;
}

int run_worker(const std::optional<std::string>& config_path, std::size_t objectives, std::size_t dim,
               std::optional<int> tcp_port) {
  testbed::TestbedSpec spec;
  try {
    if (config_path) {
      spec = load_config(*config_path).testbed;
    } else {
      spec = testbed::default_spec(objectives, dim);
    }
  } catch (const Error& e) {
    std::cerr << "worker: " << e.what() << '\n';
    return exit_config_error;
  }
  WorkerServer server(spec);
  if (tcp_port) {
    return serve_tcp(server, static_cast<std::uint16_t>(*tcp_port), std::cerr, [](std::uint16_t port) {
      std::cerr << "worker: listening on 127.0.0.1:" << port << std::endl;
    });
  }
  std::ios::sync_with_stdio(false);
  return serve_stream(server, std::cin, std::cout, std::cerr);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained multi-objective prompt evolution"};
  app.require_subcommand(1);

  EvolveArgs evolve_args;
  auto* evolve = app.add_subcommand("evolve", "Run the evolutionary optimizer");
  evolve->add_option("--config", evolve_args.config_path, "Run configuration (JSON)")->required();
  evolve->add_option("--out", evolve_args.out_dir, "Output run directory")->required();
  evolve->add_option("--jobs", evolve_args.jobs, "Concurrent worker calls")->check(CLI::PositiveNumber);

  BaselineArgs baseline_args;
  std::size_t samples = 0;
  std::string alt_prompts;
  auto* baseline = app.add_subcommand("baseline", "Sample the generator without evolution");
  baseline->add_option("--config", baseline_args.config_path, "Run configuration (JSON)")->required();
  baseline->add_option("--out", baseline_args.out_dir, "Output run directory")->required();
  auto* samples_opt = baseline->add_option("--samples", samples, "Number of samples (default: evolve budget)");
  auto* alt_opt = baseline->add_option("--alt-prompts", alt_prompts, "File with one alternate prompt per line");
  baseline->add_option("--jobs", baseline_args.jobs, "Concurrent worker calls")->check(CLI::PositiveNumber);

  HvArgs hv_args;
  std::string ref_text;
  auto* hv = app.add_subcommand("hv", "Hypervolume of a front");
  hv->add_option("--front", hv_args.front_path, "archive.json or CSV of objective vectors")->required();
  auto* ref_opt = hv->add_option("--ref", ref_text, "Reference point r1,...,rQ (default: zeros)");
  hv->add_option("--samples", hv_args.mc_samples, "Monte Carlo samples for Q >= 4");
  hv->add_option("--seed", hv_args.seed, "Monte Carlo seed");

  ReportArgs report_args;
  std::string csv_path;
  auto* report = app.add_subcommand("report", "Compare runs");
  report->add_option("runs", report_args.run_dirs, "Run directories");
  auto* csv_opt = report->add_option("--csv", csv_path, "Write the combined CSV here");

  std::string verify_dir;
  auto* verify = app.add_subcommand("verify", "Recompute a run's metrics from its snapshots");
  verify->add_option("--run", verify_dir, "Run directory")->required();

  std::string worker_config;
  std::size_t worker_objectives = 2;
  std::size_t worker_dim = 0;
  int tcp_port = 0;
  auto* worker = app.add_subcommand("worker", "Serve the builtin testbed over the worker protocol");
  auto* worker_config_opt = worker->add_option("--config", worker_config, "Take the testbed from this run config");
  worker->add_option("--objectives", worker_objectives, "Number of objectives")->check(CLI::PositiveNumber);
  worker->add_option("--dim", worker_dim, "Latent dimension (default max(2, Q))");
  auto* tcp_opt = worker->add_option("--tcp", tcp_port, "Listen on 127.0.0.1:PORT instead of stdio")
                      ->check(CLI::Range(0, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config_error;
  }

  if (evolve->parsed()) {
    return cmd_evolve(evolve_args, std::cout, std::cerr);
  }
  if (baseline->parsed()) {
    if (*samples_opt) baseline_args.samples = samples;
    if (*alt_opt) baseline_args.alt_prompts_path = alt_prompts;
    return cmd_baseline(baseline_args, std::cout, std::cerr);
  }
  if (hv->parsed()) {
    if (*ref_opt) {
      try {
        hv_args.reference = parse_reference(ref_text);
      } catch (const ConfigError& e) {
        std::cerr << "hv: " << e.what() << '\n';
        return exit_config_error;
      }
    }
    return cmd_hv(hv_args, std::cout, std::cerr);
  }
  if (report->parsed()) {
    if (*csv_opt) report_args.csv_path = csv_path;
    return cmd_report(report_args, std::cout, std::cerr);
  }
  if (verify->parsed()) {
    return cmd_verify(verify_dir, std::cout, std::cerr);
  }
  if (worker->parsed()) {
    std::optional<std::string> cfg;
    if (*worker_config_opt) cfg = worker_config;
    std::optional<int> port;
    if (*tcp_opt) port = tcp_port;
    return run_worker(cfg, worker_objectives, worker_dim, port);
  }
  return exit_config_error;
}
