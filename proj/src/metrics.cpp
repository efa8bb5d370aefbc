#include "promptevo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "promptevo/dominance.hpp"
#include "promptevo/errors.hpp"
#include "promptevo/rng.hpp"

namespace promptevo {

namespace {

// Points weakly dominating the reference, translated so the reference is the origin.
std::vector<Point> translate(std::span<const Point> points, std::span<const double> reference,
                             std::size_t& discarded) {
  std::vector<Point> out;
  discarded = 0;
  for (const auto& p : points) {
    if (p.size() != reference.size()) {
      throw UsageError("point and reference differ in length");
    }
    if (!weakly_dominates(p, reference)) {
      ++discarded;
      continue;
    }
    Point t(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) t[k] = p[k] - reference[k];
    out.push_back(std::move(t));
  }
  return out;
}

// Area dominated by (x, y) points over the origin. Sweep by x descending,
// adding the strip each point raises above the running max of y.
double area_2d(std::vector<std::pair<double, double>> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second > b.second;
  });
  double area = 0.0;
  double y_max = 0.0;
  for (const auto& [x, y] : pts) {
    if (y > y_max) {
      area += x * (y - y_max);
      y_max = y;
    }
  }
  return area;
}

double volume_3d(const std::vector<Point>& pts) {
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a][2] > pts[b][2]; });
  double volume = 0.0;
  std::vector<std::pair<double, double>> slice;
  for (std::size_t t = 0; t < order.size();) {
    const double level = pts[order[t]][2];
    while (t < order.size() && pts[order[t]][2] == level) {
      slice.emplace_back(pts[order[t]][0], pts[order[t]][1]);
      ++t;
    }
    const double next_level = t < order.size() ? pts[order[t]][2] : 0.0;
    volume += area_2d(slice) * (level - next_level);
  }
  return volume;
}

} // namespace

std::vector<std::size_t> pareto_front(std::span<const Point> points) {
  // A dominator is lexicographically larger, so scanning in descending
  // lexicographic order only needs to test against points already kept.
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(points[b].begin(), points[b].end(), points[a].begin(), points[a].end());
  });
  std::vector<std::size_t> kept;
  for (std::size_t i : order) {
    const bool dominated = std::any_of(kept.begin(), kept.end(), [&](std::size_t j) { return dominates(points[j], points[i]); });
    if (!dominated) kept.push_back(i);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

HypervolumeResult hypervolume_exact(std::span<const Point> points, std::span<const double> reference) {
  const std::size_t q = reference.size();
  if (q > 3) {
    throw UsageError("exact hypervolume supports Q <= 3; use the Monte Carlo estimator for Q = " +
                     std::to_string(q));
  }
  if (q == 0) {
    throw UsageError("hypervolume needs Q >= 1");
  }
  HypervolumeResult r;
  const auto pts = translate(points, reference, r.discarded);
  if (pts.empty()) {
    return r;
  }
  if (q == 1) {
    for (const auto& p : pts) r.value = std::max(r.value, p[0]);
  } else if (q == 2) {
    std::vector<std::pair<double, double>> xy;
    for (const auto& p : pts) xy.emplace_back(p[0], p[1]);
    r.value = area_2d(std::move(xy));
  } else {
    r.value = volume_3d(pts);
  }
  return r;
}

HypervolumeResult hypervolume_mc(std::span<const Point> points, std::span<const double> reference,
                                 std::uint64_t samples, std::uint64_t seed, kernels::Backend backend) {
  if (samples < 1000) {
    throw UsageError("Monte Carlo hypervolume needs >= 1000 samples");
  }
  const std::size_t q = reference.size();
  HypervolumeResult r;
  r.method = HypervolumeResult::Method::monte_carlo;
  r.mc_stderr = 0.0;
  const auto pts = translate(points, reference, r.discarded);
  if (pts.empty()) {
    return r;
  }
  std::vector<double> lo(q, 0.0), hi(q, 0.0);
  for (const auto& p : pts) {
    for (std::size_t k = 0; k < q; ++k) hi[k] = std::max(hi[k], p[k]);
  }
  double box = 1.0;
  for (double h : hi) box *= h;
  if (!(box > 0.0)) {
    return r;
  }
  std::vector<double> flat;
  flat.reserve(pts.size() * q);
  for (const auto& p : pts) flat.insert(flat.end(), p.begin(), p.end());
  const auto hits = kernels::mc_hit_count({flat, q, lo, hi, samples, seed}, backend);
  const double n = static_cast<double>(samples);
  const double frac = static_cast<double>(hits) / n;
  r.value = box * frac;
  r.mc_stderr = box * std::sqrt(frac * (1.0 - frac) / n);
  return r;
}

HypervolumeResult hypervolume(std::span<const Point> points, std::span<const double> reference,
                              std::uint64_t mc_samples, std::uint64_t mc_seed) {
  if (reference.size() <= 3) {
    return hypervolume_exact(points, reference);
  }
  return hypervolume_mc(points, reference, mc_samples, mc_seed);
}

MetricsRow make_metrics_row(std::size_t generation, std::size_t evaluations, std::size_t feasible_count,
                            std::span<const Candidate> archive, const RunConfig& config) {
  const std::size_t q = config.num_objectives();
  MetricsRow row;
  row.generation = generation;
  row.evaluations = evaluations;
  row.feasible_count = feasible_count;
  row.archive_size = archive.size();
  row.best.assign(q, 0.0);
  std::vector<Point> points;
  points.reserve(archive.size());
  for (const auto& c : archive) {
    const auto& y = c.objectives();
    if (!weakly_dominates(y, config.hv_reference)) {
      throw ConfigError("hv_reference is not weakly dominated by archived candidate " + c.id);
    }
    points.push_back(y.as_vector());
    for (std::size_t k = 0; k < q; ++k) row.best[k] = std::max(row.best[k], y[k]);
  }
  const auto mc_seed = derive_seed(config.run_seed ^ 0x6876'6d63'7365'6564ULL, generation, 0);
  row.hypervolume = hypervolume(points, config.hv_reference, config.hv_mc_samples, mc_seed).value;
  return row;
}

std::vector<std::string> metrics_csv_header(std::size_t num_objectives) {
  std::vector<std::string> h{"generation", "evaluations", "feasible_count", "archive_size", "hypervolume"};
  for (std::size_t k = 1; k <= num_objectives; ++k) h.push_back("best_y" + std::to_string(k));
  return h;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_metrics_row(const MetricsRow& row) {
  std::string s = std::to_string(row.generation) + "," + std::to_string(row.evaluations) + "," +
                  std::to_string(row.feasible_count) + "," + std::to_string(row.archive_size) + "," +
                  format_double(row.hypervolume);
  for (double b : row.best) s += "," + format_double(b);
  return s;
}

MetricsRow parse_metrics_row(const std::string& line, std::size_t num_objectives) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
  if (cells.size() != 5 + num_objectives) {
    throw IoError("metrics row has " + std::to_string(cells.size()) + " columns, expected " +
                  std::to_string(5 + num_objectives));
  }
  auto to_size = [&](const std::string& s) {
    char* end = nullptr;
    const auto v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0') throw IoError("bad integer in metrics row: " + s);
    return static_cast<std::size_t>(v);
  };
  auto to_double = [&](const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0') throw IoError("bad number in metrics row: " + s);
    return v;
  };
  MetricsRow row;
  row.generation = to_size(cells[0]);
  row.evaluations = to_size(cells[1]);
  row.feasible_count = to_size(cells[2]);
  row.archive_size = to_size(cells[3]);
  row.hypervolume = to_double(cells[4]);
  for (std::size_t k = 0; k < num_objectives; ++k) row.best.push_back(to_double(cells[5 + k]));
  return row;
}

} // namespace promptevo
