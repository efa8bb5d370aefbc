#include "promptevo/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "promptevo/archive.hpp"
#include "promptevo/bridge.hpp"
#include "promptevo/errors.hpp"
#include "promptevo/kernels.hpp"
#include "promptevo/objectives.hpp"
#include "promptevo/variation.hpp"

namespace promptevo {

namespace fs = std::filesystem;

namespace {

// Maps library errors onto the documented exit codes.
template <typename Fn>
int guarded(std::ostream& err, const char* command, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << command << ": " << e.what() << '\n';
    return exit_config_error;
  } catch (const UsageError& e) {
    err << command << ": " << e.what() << '\n';
    return exit_config_error;
  } catch (const ProtocolError& e) {
    err << command << ": worker protocol error: " << e.what() << '\n';
    return exit_worker_error;
  } catch (const WorkerError& e) {
    err << command << ": worker error: " << e.what() << '\n';
    return exit_worker_error;
  } catch (const IoError& e) {
    err << command << ": I/O error: " << e.what() << '\n';
    return exit_io_error;
  } catch (const fs::filesystem_error& e) {
    err << command << ": I/O error: " << e.what() << '\n';
    return exit_io_error;
  }
}

RunConfig load_for_run(const std::string& path) {
  auto config = load_config(path);
  apply_worker_override(config);
  return config;
}

std::string run_id(const char* method, const RunConfig& config) {
  return std::string(method) + "-seed" + std::to_string(config.run_seed);
}

std::vector<std::string> read_prompt_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open alternate prompts file: " + path);
  }
  std::vector<std::string> prompts;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) prompts.push_back(line);
  }
  if (prompts.empty()) {
    throw ConfigError("alternate prompts file is empty: " + path);
  }
  return prompts;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

BaselineResult run_baseline(const RunConfig& config, Worker& worker, RunWriter* writer, std::size_t samples,
                            const std::vector<std::string>& alt_prompts, int jobs) {
  if (samples < 1) {
    throw UsageError("baseline needs samples >= 1");
  }
  if (samples > 999999) {
    throw UsageError("baseline supports at most 999999 samples");
  }
  // Budget checkpoints aligned with an evolve run of the same config.
  std::vector<std::size_t> checkpoints;
  for (std::size_t b = config.mu; b <= samples; b += config.lambda) checkpoints.push_back(b);
  if (checkpoints.empty() || checkpoints.back() != samples) checkpoints.push_back(samples);

  ParetoArchive archive(config.bound);
  std::size_t feasible = 0;
  std::size_t drawn = 0;
  for (std::size_t step = 0; step < checkpoints.size(); ++step) {
    const std::size_t begin = drawn;
    const std::size_t end = checkpoints[step];
    std::vector<Candidate> batch(end - begin);
    kernels::for_each_index(batch.size(), jobs, [&](std::size_t k) {
      const std::size_t i = begin + k;
      const auto& prompt = alt_prompts.empty() ? config.prompt : alt_prompts[i % alt_prompts.size()];
      auto c = spawn_fresh(config, worker, prompt, static_cast<std::uint32_t>(i));
      batch[k] = evaluate_candidate(c, worker, config);
    });
    for (const auto& c : batch) {
      if (is_feasible(c, config.bound)) ++feasible;
      archive.insert(c);
    }
    drawn = end;
    if (writer != nullptr) {
      const auto row = make_metrics_row(step, drawn, feasible, archive.members(), config);
      writer->write({step, drawn, batch, {}, archive.members()}, row);
    }
  }
  return {archive.members(), drawn};
}

int cmd_evolve(const EvolveArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, "evolve", [&] {
    const auto config = load_for_run(args.config_path);
    auto worker = connect_worker(config);
    RunWriter writer(args.out_dir, config,
                     RunInfo{run_id("evolve", config), "evolve", static_cast<std::size_t>(std::max(1, args.jobs)), {}, {}});
    const auto state = evolve(config, *worker, *worker, writer, {args.jobs});
    const auto row = generation_stats(state, config);
    out << "evolve: " << state.generation << " generations, " << state.evaluations_used << " evaluations, archive "
        << state.archive.size() << ", hypervolume " << format_double(row.hypervolume) << " -> " << args.out_dir
        << '\n';
    return static_cast<int>(exit_ok);
  });
}

int cmd_baseline(const BaselineArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, "baseline", [&] {
    const auto config = load_for_run(args.config_path);
    std::vector<std::string> alt;
    if (args.alt_prompts_path) alt = read_prompt_lines(*args.alt_prompts_path);
    const std::size_t samples = args.samples.value_or(config.evaluation_budget());
    if (samples < 1) {
      throw ConfigError("--samples must be >= 1");
    }
    auto worker = connect_worker(config);
    RunWriter writer(args.out_dir, config,
                     RunInfo{run_id("baseline", config), "baseline", static_cast<std::size_t>(std::max(1, args.jobs)),
                             samples, alt});
    const auto result = run_baseline(config, *worker, &writer, samples, alt, args.jobs);
    out << "baseline: " << result.evaluations << " evaluations, archive " << result.archive.size() << " -> "
        << args.out_dir << '\n';
    return static_cast<int>(exit_ok);
  });
}

std::vector<Point> read_front_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open front file " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  std::vector<Point> points;
  if (first == std::string::npos) {
    return points;
  }
  if (text[first] == '{') {
    std::vector<Candidate> archive;
    try {
      archive = load_archive(path);
    } catch (const IoError& e) {
      throw ConfigError(std::string("malformed front file: ") + e.what());
    }
    for (const auto& c : archive) points.push_back(c.objectives().as_vector());
    return points;
  }
  std::istringstream lines(text);
  std::size_t line_no = 0;
  for (std::string line; std::getline(lines, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Point p;
    std::stringstream cells(line);
    bool numeric = true;
    for (std::string cell; std::getline(cells, cell, ',');) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      while (end && (*end == ' ' || *end == '\t')) ++end;
      if (cell.empty() || end == cell.c_str() || *end != '\0') {
        numeric = false;
        break;
      }
      p.push_back(v);
    }
    if (!numeric) {
      if (points.empty() && line_no == 1) continue; // header
      throw ConfigError("malformed front file " + path + ": line " + std::to_string(line_no));
    }
    if (!points.empty() && p.size() != points.front().size()) {
      throw ConfigError("malformed front file " + path + ": inconsistent column count at line " +
                        std::to_string(line_no));
    }
    points.push_back(std::move(p));
  }
  return points;
}

int cmd_hv(const HvArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, "hv", [&] {
    const auto points = read_front_file(args.front_path);
    std::vector<double> reference;
    if (args.reference) {
      reference = *args.reference;
    } else if (!points.empty()) {
      reference.assign(points.front().size(), 0.0);
    }
    if (points.empty()) {
      out << "0\n";
      return static_cast<int>(exit_ok);
    }
    if (reference.size() != points.front().size()) {
      throw ConfigError("--ref has " + std::to_string(reference.size()) + " entries but the front has Q = " +
                        std::to_string(points.front().size()));
    }
    const auto r = hypervolume(points, reference, args.mc_samples, args.seed);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", r.value);
    out << buf << '\n';
    if (r.mc_stderr) {
      std::snprintf(buf, sizeof buf, "%.6g", *r.mc_stderr);
      out << "mc_stderr " << buf << '\n';
    }
    if (r.discarded > 0) {
      err << "hv: warning: " << r.discarded << " point(s) do not dominate the reference and were ignored\n";
    }
    return static_cast<int>(exit_ok);
  });
}

RunSeries series_from_run(const LoadedRun& run) {
  RunSeries s;
  s.method = run.info.method;
  s.seed = run.config.run_seed;
  s.num_objectives = run.config.num_objectives();
  for (const auto& row : run.metrics) s.curve.emplace_back(row.evaluations, row.hypervolume);
  return s;
}

double hv_at(const RunSeries& series, std::size_t evaluations) {
  double value = 0.0;
  for (const auto& [e, hv] : series.curve) {
    if (e > evaluations) break;
    value = hv;
  }
  return value;
}

ReportSummary summarize_runs(const std::vector<RunSeries>& runs) {
  if (runs.empty()) {
    throw UsageError("report needs at least one run");
  }
  for (const auto& r : runs) {
    if (r.num_objectives != runs.front().num_objectives) {
      throw UsageError("runs disagree on the number of objectives (" + std::to_string(runs.front().num_objectives) +
                       " vs " + std::to_string(r.num_objectives) + ")");
    }
  }
  ReportSummary summary;
  std::map<std::string, std::vector<const RunSeries*>> by_method;
  for (const auto& r : runs) by_method[r.method].push_back(&r);
  for (const auto& [method, members] : by_method) {
    MethodSummary m{method, members.size(), 0, 0.0};
    std::vector<double> finals;
    for (const auto* r : members) {
      if (!r->curve.empty()) {
        m.final_budget = std::max(m.final_budget, r->curve.back().first);
        finals.push_back(r->curve.back().second);
      }
    }
    m.median_final_hv = median(finals);
    summary.total_budget = std::max(summary.total_budget, m.final_budget);
    summary.methods.push_back(m);
  }
  summary.both_methods = by_method.count("evolve") && by_method.count("baseline");
  if (summary.both_methods) {
    std::set<std::size_t> grid;
    for (const auto* r : by_method["evolve"]) {
      for (const auto& pt : r->curve) grid.insert(pt.first);
    }
    for (std::size_t budget : grid) {
      std::vector<double> evo, base;
      for (const auto* r : by_method["evolve"]) evo.push_back(hv_at(*r, budget));
      for (const auto* r : by_method["baseline"]) base.push_back(hv_at(*r, budget));
      if (median(evo) > median(base)) {
        summary.crossover_budget = budget;
        break;
      }
    }
  }
  return summary;
}

std::string format_summary(const ReportSummary& s) {
  std::ostringstream os;
  for (const auto& m : s.methods) {
    os << m.method << ": " << m.runs << " run(s), final budget " << m.final_budget << ", median final hypervolume "
       << format_double(m.median_final_hv) << '\n';
  }
  if (s.both_methods) {
    if (s.crossover_budget) {
      char pct[32];
      std::snprintf(pct, sizeof pct, "%.1f",
                    100.0 * static_cast<double>(*s.crossover_budget) / static_cast<double>(std::max<std::size_t>(1, s.total_budget)));
      os << "crossover: median evolve hypervolume first exceeds median baseline at " << *s.crossover_budget
         << " evaluations (" << pct << "% of " << s.total_budget << ")\n";
    } else {
      os << "crossover: none (median evolve hypervolume never exceeds median baseline)\n";
    }
  }
  return os.str();
}

int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err) {
  if (args.run_dirs.empty()) {
    err << "usage: promptevo report RUN_DIR [RUN_DIR ...] [--csv FILE]\n";
    return exit_config_error;
  }
  return guarded(err, "report", [&] {
    std::vector<RunSeries> runs;
    for (const auto& dir : args.run_dirs) runs.push_back(series_from_run(load_run(dir)));
    const auto summary = summarize_runs(runs);
    std::ostringstream csv;
    csv << "method,seed,evaluations,hypervolume\n";
    for (const auto& r : runs) {
      for (const auto& [e, hv] : r.curve) csv << r.method << ',' << r.seed << ',' << e << ',' << format_double(hv) << '\n';
    }
    if (args.csv_path) {
      write_text_file(*args.csv_path, csv.str());
    } else {
      out << csv.str() << '\n';
    }
    out << format_summary(summary);
    return static_cast<int>(exit_ok);
  });
}

std::vector<std::string> verify_run(const std::string& run_dir) {
  std::vector<std::string> problems;
  const auto run = load_run(run_dir);
  const auto& cfg = run.config;
  const bool is_evolve = run.info.method == "evolve";
  if (is_evolve && run.metrics.size() != cfg.max_generations + 1) {
    problems.push_back("metrics.csv has " + std::to_string(run.metrics.size()) + " rows, expected " +
                       std::to_string(cfg.max_generations + 1));
  }
  ParetoArchive replay(cfg.bound);
  std::size_t evaluations = 0;
  std::size_t cumulative_feasible = 0;
  std::vector<Candidate> last_archive;
  std::set<std::uint64_t> seeds;
  for (std::size_t g = 0; g < run.metrics.size(); ++g) {
    const auto where = "generation " + std::to_string(g) + ": ";
    const auto snap = load_snapshot(run_dir, g);
    if (snap.generation != g) problems.push_back(where + "snapshot generation field is " + std::to_string(snap.generation));
    evaluations += snap.evaluated.size();
    if (snap.evaluations_used != evaluations) {
      problems.push_back(where + "evaluations_used " + std::to_string(snap.evaluations_used) + " != replayed " +
                         std::to_string(evaluations));
    }
    if (is_evolve && snap.evaluations_used != cfg.mu + g * cfg.lambda) {
      problems.push_back(where + "evaluations_used does not equal mu + g * lambda");
    }
    for (const auto& c : snap.evaluated) {
      if (!c.evaluated()) {
        problems.push_back(where + "candidate " + c.id + " is not evaluated");
        continue;
      }
      if (!seeds.insert(c.genotype.seed).second) problems.push_back(where + "duplicate seed in " + c.id);
      if (is_feasible(c, cfg.bound)) ++cumulative_feasible;
      replay.insert(c);
    }
    std::vector<std::string> expected_ids, stored_ids;
    for (const auto& c : replay.members()) expected_ids.push_back(c.id);
    for (const auto& c : snap.archive) stored_ids.push_back(c.id);
    if (expected_ids != stored_ids) problems.push_back(where + "archive differs from replayed archive");
    for (const auto& c : snap.archive) {
      if (!is_feasible(c, cfg.bound)) problems.push_back(where + "archived candidate " + c.id + " is infeasible");
    }
    if (is_evolve && snap.population.size() != std::min(cfg.mu, evaluations)) {
      problems.push_back(where + "population size " + std::to_string(snap.population.size()) + " != mu");
    }
    const std::size_t feasible = is_evolve ? count_feasible(snap.population, cfg.bound) : cumulative_feasible;
    const auto row = make_metrics_row(g, snap.evaluations_used, feasible, snap.archive, cfg);
    const auto recomputed = format_metrics_row(row);
    if (recomputed != run.metrics_lines[g]) {
      problems.push_back(where + "metrics row '" + run.metrics_lines[g] + "' != recomputed '" + recomputed + "'");
    }
    last_archive = snap.archive;
  }
  const auto final_archive = load_archive(fs::path(run_dir) / run_files::archive);
  if (final_archive != last_archive) {
    problems.push_back("archive.json differs from the last snapshot's archive");
  }
  return problems;
}

int cmd_verify(const std::string& run_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, "verify", [&] {
    const auto problems = verify_run(run_dir);
    if (problems.empty()) {
      out << "verify: " << run_dir << " OK\n";
      return static_cast<int>(exit_ok);
    }
    for (const auto& p : problems) err << "verify: " << p << '\n';
    return static_cast<int>(exit_verify_failed);
  });
}

} // namespace promptevo
