#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "promptevo/config.hpp"
#include "promptevo/errors.hpp"
#include "promptevo/kernels.hpp"
#include "promptevo/metrics.hpp"

using namespace promptevo;
using fixtures::candidate;

namespace {

double hv(const std::vector<Point>& pts, const std::vector<double>& ref) { return hypervolume_exact(pts, ref).value; }

RunConfig two_label_config() {
  return validate_config(nlohmann::json{{"prompt", "p"}, {"labels", {"a", "b"}}});
}

} // namespace

TEST_CASE("pareto front examples") {
  CHECK(pareto_front(std::vector<Point>{}).empty());
  // (0.4, 0.4) beats each extreme point on one objective, so nothing is dominated
  const std::vector<Point> three{{0.9, 0.1}, {0.1, 0.9}, {0.4, 0.4}};
  CHECK(pareto_front(three) == std::vector<std::size_t>{0, 1, 2});
  CHECK(pareto_front(three) == oracle::pareto_indices(three));
  CHECK(pareto_front(std::vector<Point>{{0.9, 0.1}, {0.1, 0.9}, {0.1, 0.1}}) == std::vector<std::size_t>{0, 1});
  CHECK(pareto_front(std::vector<Point>{{0.3, 0.3}, {0.3, 0.3}, {0.3, 0.3}}) == std::vector<std::size_t>{0, 1, 2});
  CHECK(pareto_front(std::vector<Point>{{0.2, 0.7, 0.1}}) == std::vector<std::size_t>{0});
}

TEST_CASE("pareto front matches the oracle up to N = 256") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + rng() % 256;
    const auto pts = fixtures::random_points(rng, n, 2 + t % 3, t % 2 == 0);
    REQUIRE(pareto_front(pts) == oracle::pareto_indices(pts));
  }
}

TEST_CASE("exact hypervolume worked cases") {
  CHECK(hv({{0.5, 0.5}}, {0, 0}) == 0.25);
  CHECK(hv({{0.8, 0.2}, {0.5, 0.5}, {0.2, 0.8}}, {0, 0}) == doctest::Approx(0.37).epsilon(1e-15));
  CHECK(hv({}, {0, 0}) == 0.0);
  CHECK(hv({{0.5, 0.5, 0.5}}, {0, 0, 0}) == 0.125);
  CHECK(hv({{0.7}, {0.4}}, {0.1}) == doctest::Approx(0.6));
}

TEST_CASE("exact hypervolume ignores points outside the reference box") {
  const auto r = hypervolume_exact(std::vector<Point>{{0.5, 0.5}, {0.9, 0.05}}, std::vector<double>{0.1, 0.1});
  CHECK(r.value == doctest::Approx(0.16));
  CHECK(r.discarded == 1);
  CHECK(r.method == HypervolumeResult::Method::exact);
  CHECK_FALSE(r.mc_stderr.has_value());
}

TEST_CASE("exact hypervolume refuses Q > 3") {
  CHECK_THROWS_AS((void)hypervolume_exact(std::vector<Point>{{0.5, 0.5, 0.5, 0.5}}, std::vector<double>(4, 0.0)),
                  UsageError);
}

TEST_CASE("exact hypervolume matches the grid oracle") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 500; ++t) {
    const std::size_t q = 2 + t % 2;
    const auto pts = fixtures::random_points(rng, 1 + rng() % 20, q, t % 3 == 0);
    std::vector<double> ref(q, (t % 5 == 0) ? 0.2 : 0.0);
    REQUIRE(hv(pts, ref) == doctest::Approx(oracle::grid_hypervolume(pts, ref)).epsilon(1e-12));
  }
}

TEST_CASE("monte carlo hypervolume") {
  const std::vector<Point> pts{{0.8, 0.2}, {0.5, 0.5}, {0.2, 0.8}};
  const std::vector<double> ref{0, 0};
  const auto a = hypervolume_mc(pts, ref, 100000, 9);
  const auto b = hypervolume_mc(pts, ref, 100000, 9);
  CHECK(a.value == b.value);
  CHECK(a.method == HypervolumeResult::Method::monte_carlo);
  REQUIRE(a.mc_stderr.has_value());
  CHECK(std::abs(a.value - 0.37) <= 3.0 * *a.mc_stderr);
  CHECK(hypervolume_mc(std::vector<Point>{{0, 0}}, ref, 1000, 1).value == 0.0);
  CHECK(hypervolume_mc(std::vector<Point>{}, ref, 1000, 1).value == 0.0);
  CHECK_THROWS_AS((void)hypervolume_mc(pts, ref, 999, 1), UsageError);
}

TEST_CASE("monte carlo backends agree bit for bit") {
  if (!kernels::openmp_available()) return;
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    const auto pts = fixtures::random_points(rng, 30, 4, false);
    const std::vector<double> ref(4, 0.0);
    const auto s = hypervolume_mc(pts, ref, 50000, t, kernels::Backend::serial);
    const auto o = hypervolume_mc(pts, ref, 50000, t, kernels::Backend::openmp);
    CHECK(s.value == o.value);
    CHECK(*s.mc_stderr == *o.mc_stderr);
  }
}

TEST_CASE("dispatcher picks the method by Q") {
  const auto e = hypervolume(std::vector<Point>{{0.5, 0.5, 0.5}}, std::vector<double>(3, 0.0), 10000, 0);
  CHECK(e.method == HypervolumeResult::Method::exact);
  const auto m = hypervolume(std::vector<Point>{{0.5, 0.5, 0.5, 0.5}}, std::vector<double>(4, 0.0), 200000, 0);
  CHECK(m.method == HypervolumeResult::Method::monte_carlo);
  CHECK(std::abs(m.value - 0.0625) <= 3.0 * *m.mc_stderr + 1e-12);
}

TEST_CASE("hypervolume is monotone and ignores dominated points") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 300; ++t) {
    const std::size_t q = 2 + t % 2;
    auto pts = fixtures::random_points(rng, 1 + rng() % 15, q, t % 2 == 0);
    const std::vector<double> ref(q, 0.0);
    const double before = hv(pts, ref);
    auto more = pts;
    more.push_back(fixtures::random_points(rng, 1, q, false)[0]);
    // an exclusive contribution below rounding level may not survive the sum
    REQUIRE(hv(more, ref) >= before - 1e-12);
    // a point strictly inside the dominated region
    auto dominated = pts;
    std::vector<double> inner = pts[0];
    for (auto& v : inner) v *= 0.5;
    dominated.push_back(inner);
    REQUIRE(hv(dominated, ref) == doctest::Approx(before).epsilon(1e-14));
  }
}

TEST_CASE("metrics rows") {
  const auto config = two_label_config();
  const auto empty = make_metrics_row(0, 30, 0, std::vector<Candidate>{}, config);
  CHECK(empty.hypervolume == 0.0);
  CHECK(empty.feasible_count == 0);
  CHECK(empty.best == std::vector<double>{0.0, 0.0});

  const std::vector<Candidate> one{candidate(0, {0.6, 0.3}, 0.1)};
  const auto row = make_metrics_row(2, 90, 1, one, config);
  CHECK(row.hypervolume == doctest::Approx(0.18));
  CHECK(row.archive_size == 1);
  CHECK(row.best == std::vector<double>{0.6, 0.3});

  auto shifted = config;
  shifted.hv_reference = {0.5, 0.0};
  CHECK_THROWS_AS((void)make_metrics_row(2, 90, 1, std::vector<Candidate>{candidate(0, {0.4, 0.9}, 0.1)}, shifted),
                  ConfigError);
}

TEST_CASE("metrics csv round trip") {
  CHECK(metrics_csv_header(3) == std::vector<std::string>{"generation", "evaluations", "feasible_count",
                                                          "archive_size", "hypervolume", "best_y1", "best_y2",
                                                          "best_y3"});
  MetricsRow row{4, 150, 17, 9, 0.1 + 0.2, {1.0 / 3.0, 0.0}};
  const auto line = format_metrics_row(row);
  CHECK(line.rfind("4,150,17,9,", 0) == 0);
  CHECK(parse_metrics_row(line, 2) == row);
  CHECK_THROWS((void)parse_metrics_row("1,2,3", 2));
}
