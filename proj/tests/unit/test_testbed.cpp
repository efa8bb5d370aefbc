#include <doctest.h>

#include <cmath>
#include <set>

#include "../support/oracles.hpp"
#include "promptevo/config.hpp"
#include "promptevo/errors.hpp"
#include "promptevo/rng.hpp"
#include "promptevo/testbed.hpp"
#include "promptevo/variation.hpp"

using namespace promptevo;
using namespace promptevo::testbed;

namespace {

double correlation(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Parent/child first-coordinate correlation at a given strength.
double heritability(double strength, std::size_t dim) {
  auto spec = default_spec(2, dim);
  spec.strength = strength;
  std::vector<double> parent, child;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const auto z = synth_generate(spec, derive_seed(1, 0, i));
    const auto c = synth_mutate(spec, z, derive_seed(1, 1, i));
    for (std::size_t k = 0; k < dim; ++k) {
      parent.push_back(z[k]);
      child.push_back(c[k]);
    }
  }
  return correlation(parent, child);
}

RunConfig testbed_config(double strength = 0.6) {
  return validate_config(
      nlohmann::json{{"prompt", "p"}, {"labels", {"a", "b"}}, {"mutation_strength", strength}, {"mu", 30}});
}

} // namespace

TEST_CASE("default specs") {
  const auto s2 = default_spec(2);
  CHECK(s2.dim == 2);
  CHECK(s2.centers == std::vector<Latent>{{1.0, 0.0}, {-1.0, 0.0}});
  CHECK(s2.prompt_anchor == Latent{1.0, 0.0});
  CHECK(s2.validate().empty());

  const auto s3 = default_spec(3);
  CHECK(s3.dim == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      double d2 = 0;
      for (std::size_t k = 0; k < 3; ++k) d2 += std::pow(s3.centers[i][k] - s3.centers[j][k], 2);
      CHECK(d2 == doctest::Approx(4.0));
    }
  }
  const double inv = 1.0 / std::sqrt(3.0);
  for (double a : s3.prompt_anchor) CHECK(a == doctest::Approx(inv));

  const auto s8 = default_spec(2, 8);
  CHECK(s8.dim == 8);
  CHECK(s8.centers[1][0] == -1.0);
  CHECK(s8.centers[1][7] == 0.0);
}

TEST_CASE("spec validation") {
  auto s = default_spec(2);
  s.sigma = 0;
  CHECK_FALSE(s.validate().empty());
  s = default_spec(2);
  s.centers[1] = s.centers[0];
  CHECK_FALSE(s.validate().empty());
  s = default_spec(2);
  s.prompt_anchor = {2.0, 0.0};
  CHECK_FALSE(s.validate().empty());
}

TEST_CASE("latent payload round trip") {
  const Latent z{0.1, -2.5, 1e-300, 3.0};
  const auto bytes = encode_latent(z);
  CHECK(bytes.size() == 32);
  CHECK(decode_latent(bytes) == z);
  // little-endian IEEE-754: 1.0 is 00 00 00 00 00 00 f0 3f
  CHECK(encode_latent(Latent{1.0}) == Bytes{0, 0, 0, 0, 0, 0, 0xf0, 0x3f});
  CHECK_THROWS((void)decode_latent(Bytes{1, 2, 3}));
}

TEST_CASE("generate is deterministic and collision free") {
  const auto spec = default_spec(2, 4);
  CHECK(synth_generate(spec, 5) == synth_generate(spec, 5));
  std::set<Latent> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(synth_generate(spec, derive_seed(3, 0, i)));
  CHECK(seen.size() == 10000);
}

TEST_CASE("generate moments") {
  const auto spec = default_spec(2, 4);
  const int n = 10000;
  std::vector<double> sum(4, 0), sq(4, 0);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto z = synth_generate(spec, derive_seed(9, 0, i));
    for (std::size_t k = 0; k < 4; ++k) {
      sum[k] += z[k];
      sq[k] += z[k] * z[k];
    }
  }
  for (std::size_t k = 0; k < 4; ++k) {
    const double mean = sum[k] / n;
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(sq[k] / n - mean * mean - 1.0) < 0.1);
  }
}

TEST_CASE("mutation strength extremes") {
  auto spec = default_spec(2, 3);
  const auto z = synth_generate(spec, 1);
  spec.strength = 0.0;
  CHECK(synth_mutate(spec, z, 2) == z);
  spec.strength = 1.0;
  CHECK(std::abs(heritability(1.0, 2)) < 0.05);
}

TEST_CASE("mutation heritability") {
  CHECK(std::abs(heritability(0.6, 2) - 0.8) < 0.05);
  CHECK(std::abs(heritability(0.3, 2) - std::sqrt(1 - 0.09)) < 0.05);
}

TEST_CASE("mutation keeps the stationary distribution") {
  auto spec = default_spec(2, 2);
  const int chains = 1000;
  double sq = 0, sum = 0;
  for (std::uint64_t c = 0; c < chains; ++c) {
    auto z = synth_generate(spec, derive_seed(4, 0, c));
    for (std::uint64_t step = 1; step <= 50; ++step) z = synth_mutate(spec, z, derive_seed(4, step, c));
    sum += z[0];
    sq += z[0] * z[0];
  }
  const double mean = sum / chains;
  CHECK(std::abs(sq / chains - mean * mean - 1.0) < 0.1);
}

TEST_CASE("classifier values") {
  const auto spec = default_spec(2);
  const auto y0 = synth_classify(spec, Latent{0.0, 0.0});
  CHECK(y0[0] == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(y0[1] == doctest::Approx(0.6065306597126334).epsilon(1e-15));
  CHECK(synth_classify(spec, spec.centers[0])[0] == 1.0);
  const auto eq = synth_classify(spec, Latent{0.0, 3.0});
  CHECK(eq[0] == eq[1]);
  const auto s3 = default_spec(3);
  const auto y3 = synth_classify(s3, Latent{0.0, 0.0, 0.0});
  CHECK(y3[0] == y3[1]);
  CHECK(y3[1] == y3[2]);
}

TEST_CASE("no latent satisfies both default labels above 0.95") {
  // y_i > 0.95 needs |z - c_i| < sqrt(-2 ln 0.95) ~ 0.32, but the centers are
  // 2 apart; the best joint value sits at the midpoint.
  const auto spec = default_spec(2);
  const double radius = std::sqrt(-2.0 * std::log(0.95));
  CHECK(2.0 * radius < 2.0);
  SeedStream rng(1);
  for (int i = 0; i < 20000; ++i) {
    const Latent z{4 * rng.next_uniform() - 2, 4 * rng.next_uniform() - 2};
    const auto y = synth_classify(spec, z);
    REQUIRE_FALSE((y[0] > 0.95 && y[1] > 0.95));
  }
}

TEST_CASE("similarity") {
  const auto spec = default_spec(2);
  CHECK(synth_similarity(spec, spec.prompt_anchor) == 1.0);
  CHECK(synth_similarity(spec, Latent{0.0, 2.0}) == 0.0);
  CHECK(synth_similarity(spec, Latent{-3.0, 0.0}) == -1.0);
  CHECK(synth_similarity(spec, Latent{0.0, 0.0}) == 0.0);
}

TEST_CASE("known pareto front") {
  const auto spec = default_spec(2);
  const auto front = known_pareto_front(spec, 201);
  REQUIRE(front.size() == 201);
  CHECK(front.front()[0] == doctest::Approx(1.0));
  CHECK(front.front()[1] == doctest::Approx(std::exp(-2.0)));
  CHECK(front.back()[0] == doctest::Approx(std::exp(-2.0)));
  CHECK(front.back()[1] == doctest::Approx(1.0));
  CHECK(front[100][0] == doctest::Approx(std::exp(-0.5)));
  CHECK(front[100][1] == doctest::Approx(std::exp(-0.5)));
  CHECK(oracle::pareto_indices(front).size() == front.size());
  CHECK_THROWS((void)known_pareto_front(default_spec(3), 10));
  CHECK_THROWS((void)known_pareto_front(spec, 1));
}

TEST_CASE("phenotype ids carry the latent") {
  const auto spec = default_spec(2, 3);
  const auto z = synth_generate(spec, 77);
  const PhenotypeRef p(phenotype_id_for(encode_latent(z)));
  CHECK(p.id().rfind("tb:", 0) == 0);
  CHECK(latent_from_phenotype(p, 3) == z);
  CHECK_THROWS((void)latent_from_phenotype(PhenotypeRef("other"), 3));
  CHECK_THROWS((void)latent_from_phenotype(p, 2));
}

TEST_CASE("testbed worker contract") {
  TestbedWorker w(default_spec(2));
  const auto a = w.generate("p", 10);
  CHECK(a.payload == w.generate("other prompt", 10).payload);
  const Genotype g{a.payload, 10};
  CHECK(w.mutate("p", g, 11, 0.0).payload == a.payload);
  CHECK(w.mutate("p", g, 11, 0.6).payload != a.payload);
  CHECK_THROWS((void)w.mutate("p", g, 11, 1.5));
  const auto y = w.evaluate(a.phenotype, {"a", "b"});
  CHECK(y.size() == 2);
  CHECK_THROWS((void)w.evaluate(a.phenotype, {"a"}));
  const double cos = w.embed_similarity(a.phenotype, "p");
  CHECK(cos >= -1.0);
  CHECK(cos <= 1.0);
}

TEST_CASE("spawn_initial") {
  auto config = testbed_config();
  TestbedWorker w(config.testbed);
  const auto pop = spawn_initial(config, w);
  REQUIRE(pop.size() == 30);
  std::set<std::uint64_t> seeds;
  for (std::uint32_t i = 0; i < pop.size(); ++i) {
    CHECK(pop[i].generation_born == 0);
    CHECK_FALSE(pop[i].parent_id.has_value());
    CHECK_FALSE(pop[i].evaluated());
    CHECK(pop[i].genotype.seed == derive_seed(config.run_seed, 0, i));
    seeds.insert(pop[i].genotype.seed);
  }
  CHECK(seeds.size() == 30);
  const auto again = spawn_initial(config, w, 4);
  CHECK(again == pop);

  config.mu = 2;
  CHECK(spawn_initial(config, w).size() == 2);
}

TEST_CASE("spawn_offspring") {
  auto config = testbed_config();
  TestbedWorker w(config.testbed);
  auto parent = spawn_initial(config, w)[0];
  CHECK_THROWS_AS((void)spawn_offspring(config, w, parent, 1, 0), UsageError);
  parent.evaluation = Evaluation{ObjectiveVector({0.5, 0.5}), 0.1};
  CHECK_THROWS_AS((void)spawn_offspring(config, w, parent, 0, 0), UsageError);
  const auto a = spawn_offspring(config, w, parent, 1, 0);
  const auto b = spawn_offspring(config, w, parent, 1, 1);
  CHECK(a.parent_id == parent.id);
  CHECK(a.generation_born == 1);
  CHECK(a.id == make_candidate_id(1, 0));
  CHECK(a.genotype.seed == derive_seed(config.run_seed, 1, 0));
  CHECK(a.genotype.payload != b.genotype.payload);

  auto frozen = testbed_config(0.0);
  TestbedWorker fw(frozen.testbed);
  CHECK(spawn_offspring(frozen, fw, parent, 1, 0).genotype.payload == parent.genotype.payload);
}

namespace {

class FailingGenerator final : public Generator {
public:
  Generated generate(const std::string&, std::uint64_t seed) override {
    if (seed == fail_seed) throw WorkerError("backend exploded");
    return {encode_latent(Latent{0.0, 1.0}), PhenotypeRef("x")};
  }
  Generated mutate(const std::string&, const Genotype& g, std::uint64_t, double) override {
    return {g.payload, PhenotypeRef("x")};
  }
  std::uint64_t fail_seed = 0;
};

} // namespace

TEST_CASE("generator failure carries the birth index") {
  auto config = testbed_config();
  FailingGenerator g;
  g.fail_seed = derive_seed(config.run_seed, 0, 7);
  try {
    (void)spawn_initial(config, g, 3);
    FAIL("expected WorkerError");
  } catch (const WorkerError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("backend exploded") != std::string::npos);
    CHECK(msg.find("7") != std::string::npos);
  }
}
