// Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails. INFO lines are reported but never fail the run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "../support/oracles.hpp"
#include "promptevo/commands.hpp"
#include "promptevo/config.hpp"
#include "promptevo/engine.hpp"
#include "promptevo/metrics.hpp"
#include "promptevo/objectives.hpp"
#include "promptevo/run_io.hpp"
#include "promptevo/selection.hpp"
#include "promptevo/testbed.hpp"

using namespace promptevo;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned thresholds.
constexpr int oracle_instances = 1000;
constexpr std::size_t oracle_max_n = 64;
constexpr double oracle_time_limit_s = 30.0;
constexpr int mc_instances = 100;
constexpr double mc_sigmas = 3.0;
constexpr int hv_property_cases = 1000;
constexpr int deviation_cases = 1000;
constexpr int seeds = 20;
constexpr double crossover_budget_fraction = 0.5;
constexpr double crossover_seed_fraction = 0.7;
constexpr double fig3_time_limit_s = 120.0;
constexpr double front_quality_fraction = 0.9;
constexpr double front_quality_seed_fraction = 0.8;
constexpr std::size_t front_resolution = 200;
// The worked hypervolume cases are compared to the nearest double of the
// decimal value; the sweep's three products may round differently.
constexpr double worked_case_ulps = 4.0;

const std::string cli = PROMPTEVO_CLI_PATH;

int failures = 0;
int known_red_failures = 0;
// Criteria named with --known-red still print FAIL when they fail, but do not
// set the exit code. See README, "Acceptance suite".
std::set<std::string> known_red;

void report(bool pass, const std::string& name, const std::string& detail) {
  const bool tolerated = !pass && known_red.count(name) > 0;
  std::printf("%s  %-22s %s%s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str(),
              tolerated ? " [known red]" : "");
  std::fflush(stdout);
  if (tolerated) {
    ++known_red_failures;
  } else if (!pass) {
    ++failures;
  }
}

void info(const std::string& name, const std::string& detail) {
  std::printf("INFO  %-22s %s\n", name.c_str(), detail.c_str());
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

RunConfig default_config(std::uint64_t seed) {
  return validate_config(nlohmann::json{{"prompt", "a photo"}, {"labels", {"cat", "dog"}}, {"run_seed", seed}});
}

class TempDir {
public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("promptevo-acceptance-" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  fs::path operator/(const std::string& s) const { return path_ / s; }

private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = "env -u PROMPTEVO_WORKER " + cli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void oracle_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> size(1, oracle_max_n);
  int sort_mismatch = 0, front_mismatch = 0;
  for (int t = 0; t < oracle_instances; ++t) {
    const std::size_t q = 2 + t % 3;
    const std::size_t n = size(rng);
    const auto pop = fixtures::random_population(rng, n, q, 0.35);
    std::vector<std::vector<double>> objs;
    std::vector<double> devs;
    for (const auto& c : pop) {
      objs.push_back(c.objectives().as_vector());
      devs.push_back(c.deviation());
    }
    auto expected = oracle::peel_fronts(objs, devs, 0.35);
    for (auto& f : expected) std::sort(f.begin(), f.end());
    if (fast_nondominated_sort(pop, 0.35).fronts != expected) ++sort_mismatch;

    const auto pts = fixtures::random_points(rng, n, q, t % 2 == 0);
    if (pareto_front(pts) != oracle::pareto_indices(pts)) ++front_mismatch;
  }
  const double secs = seconds_since(t0);
  report(sort_mismatch == 0 && front_mismatch == 0 && secs < oracle_time_limit_s, "oracle-equivalence",
         fmt("%d instances (N<=%zu, Q in {2,3,4}): sort mismatches %d, pareto_front mismatches %d, %.2f s (limit %.0f s)",
             oracle_instances, oracle_max_n, sort_mismatch, front_mismatch, secs, oracle_time_limit_s));
}

void hypervolume_correctness() {
  const std::vector<double> ref2{0.0, 0.0};
  const double single = hypervolume_exact(std::vector<Point>{{0.5, 0.5}}, ref2).value;
  const double three = hypervolume_exact(std::vector<Point>{{0.8, 0.2}, {0.5, 0.5}, {0.2, 0.8}}, ref2).value;
  const double ulp37 = std::nextafter(0.37, 1.0) - 0.37;
  const bool worked_ok = single == 0.25 && std::abs(three - 0.37) <= worked_case_ulps * ulp37;

  std::mt19937_64 rng(777);
  int mc_misses = 0;
  double worst_z = 0.0;
  for (int t = 0; t < mc_instances; ++t) {
    const std::size_t q = 2 + t % 2;
    const auto pts = fixtures::random_points(rng, 1 + rng() % 12, q, false);
    const std::vector<double> ref(q, 0.0);
    const double exact = hypervolume_exact(pts, ref).value;
    const auto mc = hypervolume_mc(pts, ref, 100000, static_cast<std::uint64_t>(t));
    const double z = std::abs(exact - mc.value) / *mc.mc_stderr;
    worst_z = std::max(worst_z, z);
    if (std::abs(exact - mc.value) > mc_sigmas * *mc.mc_stderr) ++mc_misses;
  }

  int mono_fail = 0, invariance_fail = 0;
  for (int t = 0; t < hv_property_cases; ++t) {
    const std::size_t q = 2 + t % 2;
    const std::vector<double> ref(q, 0.0);
    auto pts = fixtures::random_points(rng, 1 + rng() % 15, q, t % 2 == 0);
    const double before = hypervolume_exact(pts, ref).value;
    auto more = pts;
    more.push_back(fixtures::random_points(rng, 1, q, false)[0]);
    if (hypervolume_exact(more, ref).value < before - 1e-12) ++mono_fail;

    // add a point dominated by an existing one, then compare with and without it
    std::uniform_real_distribution<double> shrink(0.0, 1.0);
    auto dominated = pts[rng() % pts.size()];
    for (auto& v : dominated) v *= shrink(rng);
    auto with = pts;
    with.push_back(dominated);
    const double hv_with = hypervolume_exact(with, ref).value;
    if (std::abs(hv_with - before) > 1e-14 * std::max(1.0, before)) ++invariance_fail;
  }
  // Calibration of the Monte Carlo error bar itself: over many instances the
  // share of |z| > 3 should sit near the Gaussian 0.27%.
  int calibrated = 0, tail = 0;
  for (int t = 0; t < 3000; ++t) {
    const std::size_t q = 2 + t % 2;
    const auto pts = fixtures::random_points(rng, 2 + rng() % 11, q, false);
    const std::vector<double> ref(q, 0.0);
    const auto mc = hypervolume_mc(pts, ref, 20000, 1000000 + static_cast<std::uint64_t>(t));
    if (*mc.mc_stderr == 0.0) continue;
    ++calibrated;
    tail += std::abs(hypervolume_exact(pts, ref).value - mc.value) > mc_sigmas * *mc.mc_stderr;
  }
  info("mc-calibration", fmt("%d instances: |exact - mc| > %.0f sigma in %.2f%% (Gaussian %.2f%%); P(>= 1 miss in %d) "
                             "= %.0f%%",
                             calibrated, mc_sigmas, 100.0 * tail / calibrated, 100.0 * std::erfc(mc_sigmas / std::sqrt(2.0)),
                             mc_instances, 100.0 * (1.0 - std::pow(1.0 - std::erfc(mc_sigmas / std::sqrt(2.0)), mc_instances))));

  report(worked_ok && mc_misses == 0 && mono_fail == 0 && invariance_fail == 0, "hypervolume",
         fmt("single box %.17g, three boxes %.17g; MC misses %d/%d beyond %.0f sigma (worst %.2f sigma); "
             "monotonicity failures %d/%d; dominated-point failures %d/%d",
             single, three, mc_misses, mc_instances, mc_sigmas, worst_z, mono_fail, hv_property_cases, invariance_fail,
             hv_property_cases));
}

void deviation_behaviour() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> tau_dist(1e-3, 100.0), cos_dist(-1.0, 1.0), scale(1e-3, 1e3);
  int endpoint_fail = 0, scaling_fail = 0;
  for (int t = 0; t < deviation_cases; ++t) {
    const double tau = tau_dist(rng);
    if (deviation(1.0, tau) != 0.0 || deviation(0.0, tau) != tau || deviation(-1.0, tau) != 2.0 * tau) {
      ++endpoint_fail;
    }
    const double cos = cos_dist(rng);
    const double b = tau_dist(rng) * 0.5;
    const double c = scale(rng);
    if (is_feasible(deviation(cos, tau), b) != is_feasible(deviation(cos, c * tau), c * b)) ++scaling_fail;
  }
  report(endpoint_fail == 0 && scaling_fail == 0, "deviation",
         fmt("%d sampled tau: endpoint failures %d; joint (tau, b) scaling disagreements %d", deviation_cases,
             endpoint_fail, scaling_fail));
}

struct Tracker final : RunSink {
  double bound;
  double last_hv = 0.0;
  int hv_drops = 0;
  int infeasible = 0;
  explicit Tracker(double b) : bound(b) {}
  void on_generation(const EvolutionState& s, const MetricsRow& row) override {
    if (row.hypervolume < last_hv) ++hv_drops;
    last_hv = row.hypervolume;
    for (const auto& c : s.archive) {
      if (!is_feasible(c, bound)) ++infeasible;
    }
  }
};

void elitism_feasibility() {
  int drops = 0, infeasible = 0, generations = 0;
  for (int s = 1; s <= seeds; ++s) {
    const auto config = default_config(s);
    testbed::TestbedWorker worker(config.testbed);
    Tracker tracker(config.bound);
    const auto state = evolve(config, worker, worker, tracker);
    drops += tracker.hv_drops;
    infeasible += tracker.infeasible;
    generations += static_cast<int>(state.generation) + 1;
  }
  report(drops == 0 && infeasible == 0, "elitism-feasibility",
         fmt("%d runs, %d generations: hypervolume decreases %d, infeasible archive members %d", seeds, generations,
             drops, infeasible));
}

// Hypervolume of the known Q = 2 front restricted to latents that satisfy the
// deviation bound.
double clipped_front_hv(const RunConfig& config) {
  const auto set = testbed::known_pareto_set(config.testbed, front_resolution);
  std::vector<Point> feasible;
  for (const auto& z : set) {
    if (is_feasible(deviation(testbed::synth_similarity(config.testbed, z), config.tau), config.bound)) {
      feasible.push_back(testbed::synth_classify(config.testbed, z));
    }
  }
  return hypervolume_exact(feasible, config.hv_reference).value;
}

void fig3_shape() {
  const auto t0 = Clock::now();
  TempDir tmp;
  std::vector<double> evolve_final, baseline_final;
  int early_crossovers = 0;
  std::size_t budget = 0;
  std::vector<std::string> per_seed;
  for (int s = 1; s <= seeds; ++s) {
    const auto config = default_config(s);
    budget = config.evaluation_budget();
    testbed::TestbedWorker worker(config.testbed);
    const auto evo_dir = tmp / ("evolve-" + std::to_string(s));
    const auto base_dir = tmp / ("baseline-" + std::to_string(s));
    {
      RunWriter writer(evo_dir, config, RunInfo{"evolve", "evolve", 1, {}, {}});
      (void)evolve(config, worker, worker, writer);
    }
    {
      RunWriter writer(base_dir, config, RunInfo{"baseline", "baseline", 1, budget, {}});
      (void)run_baseline(config, worker, &writer, budget, {});
    }
    const auto evo = series_from_run(load_run(evo_dir));
    const auto base = series_from_run(load_run(base_dir));
    evolve_final.push_back(evo.curve.back().second);
    baseline_final.push_back(base.curve.back().second);
    const auto summary = summarize_runs({evo, base});
    const bool early = summary.crossover_budget &&
                       static_cast<double>(*summary.crossover_budget) <= crossover_budget_fraction * budget;
    early_crossovers += early;
  }
  const double secs = seconds_since(t0);
  const double me = median(evolve_final), mb = median(baseline_final);
  const int needed = static_cast<int>(std::ceil(crossover_seed_fraction * seeds));
  report(me > mb && early_crossovers >= needed && secs < fig3_time_limit_s, "evolve-vs-baseline",
         fmt("%d paired seeds, budget %zu: median final HV evolve %.4f vs baseline %.4f; crossover <= %.0f%% of "
             "budget in %d/%d seeds (need %d); %.1f s (limit %.0f s)",
             seeds, budget, me, mb, 100 * crossover_budget_fraction, early_crossovers, seeds, needed, secs,
             fig3_time_limit_s));
}

// Fraction of seeds whose final archive reaches the front-quality threshold.
std::pair<int, std::vector<double>> front_quality_hits(std::size_t dim) {
  int hits = 0;
  std::vector<double> ratios;
  for (int s = 1; s <= seeds; ++s) {
    auto config = default_config(s);
    if (dim != config.testbed.dim) {
      config = validate_config(nlohmann::json{
          {"prompt", "a photo"}, {"labels", {"cat", "dog"}}, {"run_seed", s}, {"testbed", {{"dim", dim}}}});
    }
    testbed::TestbedWorker worker(config.testbed);
    NullSink sink;
    const auto state = evolve(config, worker, worker, sink);
    const double ratio = generation_stats(state, config).hypervolume / clipped_front_hv(config);
    ratios.push_back(ratio);
    hits += ratio >= front_quality_fraction;
  }
  return {hits, ratios};
}

void front_quality() {
  const auto config = default_config(0);
  const double target = clipped_front_hv(config);
  const auto [hits, ratios] = front_quality_hits(config.testbed.dim);
  const int needed = static_cast<int>(std::ceil(front_quality_seed_fraction * seeds));
  report(hits >= needed, "front-quality",
         fmt("clipped known front HV %.5f; final archive >= %.0f%% of it in %d/%d seeds (need %d); median ratio %.3f, "
             "min %.3f",
             target, 100 * front_quality_fraction, hits, seeds, needed, median(ratios),
             *std::min_element(ratios.begin(), ratios.end())));

  const auto [hits8, ratios8] = front_quality_hits(8);
  info("front-quality-dim8", fmt("same check with an 8-dimensional latent: %d/%d seeds, median ratio %.3f", hits8,
                                 seeds, median(ratios8)));
}

void determinism() {
  TempDir tmp;
  int metric_diffs = 0, archive_diffs = 0, failures_to_run = 0;
  for (int s : {1, 7, 13}) {
    const auto cfg = tmp / ("config-" + std::to_string(s) + ".json");
    std::ofstream(cfg) << to_json(default_config(s)).dump(2);
    const auto a = tmp / ("a-" + std::to_string(s));
    const auto b = tmp / ("b-" + std::to_string(s));
    const auto c = tmp / ("c-" + std::to_string(s));
    failures_to_run += run_cli("evolve --config " + cfg.string() + " --out " + a.string()) != 0;
    failures_to_run += run_cli("evolve --config " + cfg.string() + " --out " + b.string()) != 0;
    failures_to_run += run_cli("evolve --jobs 8 --config " + cfg.string() + " --out " + c.string()) != 0;
    if (slurp(a / "metrics.csv").empty() || slurp(a / "metrics.csv") != slurp(b / "metrics.csv")) ++metric_diffs;
    std::vector<std::string> ids_a, ids_c;
    for (const auto& x : load_archive(a / "archive.json")) ids_a.push_back(x.id);
    for (const auto& x : load_archive(c / "archive.json")) ids_c.push_back(x.id);
    if (ids_a.empty() || ids_a != ids_c) ++archive_diffs;
  }
  report(failures_to_run == 0 && metric_diffs == 0 && archive_diffs == 0, "determinism",
         fmt("3 seeds via the CLI: metrics.csv differences on rerun %d; archive id differences jobs 1 vs 8 %d; "
             "failed invocations %d",
             metric_diffs, archive_diffs, failures_to_run));
}

void guarded(const char* name, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(false, name, std::string("threw: ") + e.what());
  }
}

} // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; i += 2) {
    if (std::string(argv[i]) == "--known-red") known_red.insert(argv[i + 1]);
  }
  guarded("oracle-equivalence", oracle_equivalence);
  guarded("hypervolume", hypervolume_correctness);
  guarded("deviation", deviation_behaviour);
  guarded("elitism-feasibility", elitism_feasibility);
  guarded("evolve-vs-baseline", fig3_shape);
  guarded("front-quality", front_quality);
  guarded("determinism", determinism);
  std::printf("%s: %d criterion(s) failed, %d known red\n", failures == 0 ? "OK" : "FAILED", failures,
              known_red_failures);
  return failures == 0 ? 0 : 1;
}
