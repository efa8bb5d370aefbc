#include "promptevo/run_io.hpp"

#include <cstdio>
#include <sstream>

#include "promptevo/base64.hpp"
#include "promptevo/errors.hpp"

namespace promptevo {

namespace fs = std::filesystem;
using nlohmann::json;

json to_json(const Candidate& c) {
  json phenotype = {{"id", c.phenotype.id()}};
  if (c.phenotype.dims()) phenotype["dims"] = *c.phenotype.dims();
  json j = {{"id", c.id},
            {"generation_born", c.generation_born},
            {"parent_id", c.parent_id ? json(*c.parent_id) : json(nullptr)},
            {"genotype", {{"payload", base64_encode(c.genotype.payload)}, {"seed", c.genotype.seed}}},
            {"phenotype", phenotype}};
  if (c.evaluation) {
    j["objectives"] = c.evaluation->objectives.as_vector();
    j["deviation"] = c.evaluation->deviation;
  } else {
    j["objectives"] = nullptr;
    j["deviation"] = nullptr;
  }
  return j;
}

Candidate candidate_from_json(const json& j) {
  try {
    Candidate c;
    c.id = j.at("id").get<std::string>();
    c.generation_born = j.at("generation_born").get<std::uint32_t>();
    if (!j.at("parent_id").is_null()) c.parent_id = j["parent_id"].get<std::string>();
    c.genotype.payload = base64_decode(j.at("genotype").at("payload").get<std::string>());
    c.genotype.seed = j.at("genotype").at("seed").get<std::uint64_t>();
    const auto& ph = j.at("phenotype");
    std::optional<PhenotypeRef::Dims> dims;
    if (ph.contains("dims")) dims = ph["dims"].get<PhenotypeRef::Dims>();
    c.phenotype = PhenotypeRef(ph.at("id").get<std::string>(), dims);
    if (!j.at("objectives").is_null()) {
      c.evaluation = Evaluation{ObjectiveVector(j["objectives"].get<std::vector<double>>()),
                                j.at("deviation").get<double>()};
    }
    if ((c.generation_born == 0) == c.parent_id.has_value()) {
      throw IoError("candidate " + c.id + ": parent_id must be absent iff generation_born == 0");
    }
    return c;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed candidate record: ") + e.what());
  } catch (const ProtocolError& e) {
    throw IoError(std::string("malformed candidate record: ") + e.what());
  }
}

json to_json(const RunInfo& info) {
  json j = {{"run_id", info.run_id}, {"method", info.method}, {"jobs", info.jobs}};
  if (info.samples) j["samples"] = *info.samples;
  if (!info.alt_prompts.empty()) j["alt_prompts"] = info.alt_prompts;
  return j;
}

RunInfo run_info_from_json(const json& j) {
  try {
    RunInfo info;
    info.run_id = j.at("run_id").get<std::string>();
    info.method = j.at("method").get<std::string>();
    info.jobs = j.value("jobs", std::size_t{1});
    if (j.contains("samples")) info.samples = j["samples"].get<std::size_t>();
    if (j.contains("alt_prompts")) info.alt_prompts = j["alt_prompts"].get<std::vector<std::string>>();
    return info;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed run.json: ") + e.what());
  }
}

std::string snapshot_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "gen_%04zu.json", index);
  return buf;
}

void write_text_file(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text) || !out.flush()) {
    throw IoError("cannot write " + file.string());
  }
}

json read_json_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + file.string());
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError("cannot parse " + file.string() + ": " + e.what());
  }
}

namespace {

json candidates_json(std::span<const Candidate> cs) {
  json arr = json::array();
  for (const auto& c : cs) arr.push_back(to_json(c));
  return arr;
}

std::vector<Candidate> candidates_from(const json& arr) {
  std::vector<Candidate> out;
  if (!arr.is_array()) throw IoError("expected a candidate list");
  for (const auto& j : arr) out.push_back(candidate_from_json(j));
  return out;
}

} // namespace

RunWriter::RunWriter(fs::path dir, const RunConfig& config, const RunInfo& info)
    : dir_(std::move(dir)), info_(info), labels_(config.labels) {
  std::error_code ec;
  fs::create_directories(dir_ / run_files::generations, ec);
  if (ec) {
    throw IoError("cannot create run directory " + dir_.string() + ": " + ec.message());
  }
  write_text_file(dir_ / run_files::config, to_json(config).dump(2) + "\n");
  write_text_file(dir_ / run_files::run, to_json(info).dump(2) + "\n");
  metrics_.open(dir_ / run_files::metrics, std::ios::binary | std::ios::trunc);
  if (!metrics_) {
    throw IoError("cannot write " + (dir_ / run_files::metrics).string());
  }
  const auto header = metrics_csv_header(config.num_objectives());
  for (std::size_t i = 0; i < header.size(); ++i) metrics_ << (i ? "," : "") << header[i];
  metrics_ << '\n' << std::flush;
}

void RunWriter::on_generation(const EvolutionState& state, const MetricsRow& row) {
  write({state.generation, state.evaluations_used, state.evaluated, state.population, state.archive}, row);
}

void RunWriter::write(const Snapshot& s, const MetricsRow& row) {
  json snap = {{"generation", s.generation},
               {"evaluations_used", s.evaluations_used},
               {"evaluated", candidates_json(s.evaluated)},
               {"population", candidates_json(s.population)},
               {"archive", candidates_json(s.archive)}};
  write_text_file(dir_ / run_files::generations / snapshot_file_name(s.generation), snap.dump() + "\n");
  json archive = {{"run_id", info_.run_id},
                  {"method", info_.method},
                  {"labels", labels_},
                  {"generation", s.generation},
                  {"candidates", candidates_json(s.archive)}};
  write_text_file(dir_ / run_files::archive, archive.dump(2) + "\n");
  metrics_ << format_metrics_row(row) << '\n' << std::flush;
  if (!metrics_) {
    throw IoError("cannot append to " + (dir_ / run_files::metrics).string());
  }
}

LoadedRun load_run(const fs::path& dir) {
  LoadedRun run;
  run.dir = dir;
  try {
    run.config = validate_config(read_json_file(dir / run_files::config));
  } catch (const ConfigError& e) {
    throw IoError("bad config snapshot in " + dir.string() + ": " + e.what());
  }
  run.info = run_info_from_json(read_json_file(dir / run_files::run));
  std::ifstream in(dir / run_files::metrics, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + (dir / run_files::metrics).string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw IoError("empty metrics.csv in " + dir.string());
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    run.metrics_lines.push_back(line);
    run.metrics.push_back(parse_metrics_row(line, run.config.num_objectives()));
  }
  return run;
}

Snapshot load_snapshot(const fs::path& dir, std::size_t index) {
  const auto j = read_json_file(dir / run_files::generations / snapshot_file_name(index));
  try {
    Snapshot s;
    s.generation = j.at("generation").get<std::size_t>();
    s.evaluations_used = j.at("evaluations_used").get<std::size_t>();
    s.evaluated = candidates_from(j.at("evaluated"));
    s.population = candidates_from(j.at("population"));
    s.archive = candidates_from(j.at("archive"));
    return s;
  } catch (const json::exception& e) {
    throw IoError("malformed snapshot " + snapshot_file_name(index) + ": " + e.what());
  }
}

std::vector<Candidate> load_archive(const fs::path& file) {
  const auto j = read_json_file(file);
  if (!j.is_object() || !j.contains("candidates")) {
    throw IoError(file.string() + " is not an archive file");
  }
  return candidates_from(j["candidates"]);
}

} // namespace promptevo
