// Serial reference vs OpenMP kernels. Run with --benchmark_filter to pick one.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "promptevo/kernels.hpp"

namespace k = promptevo::kernels;

namespace {

struct Population {
  std::vector<double> objectives;
  std::vector<double> deviations;
  std::size_t q;

  k::PopulationView view() const { return {objectives, deviations, q}; }
};

Population make_population(std::size_t n, std::size_t q) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Population p{std::vector<double>(n * q), std::vector<double>(n), q};
  for (auto& x : p.objectives) x = u(rng);
  for (auto& d : p.deviations) d = 0.7 * u(rng);
  return p;
}

template <k::DominationMatrix (*Kernel)(const k::PopulationView&, double)>
void domination_matrix(benchmark::State& state) {
  const auto pop = make_population(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Kernel(pop.view(), 0.35));
  }
  state.SetComplexityN(state.range(0));
}

template <std::uint64_t (*Kernel)(const k::HitCountRequest&)>
void mc_hits(benchmark::State& state) {
  const auto pts = make_population(20, 3);
  const std::vector<double> lo(3, 0.0), hi(3, 1.0);
  const k::HitCountRequest req{pts.objectives, 3, lo, hi, static_cast<std::uint64_t>(state.range(0)), 7};
  for (auto _ : state) {
    benchmark::DoNotOptimize(Kernel(req));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK(domination_matrix<k::serial::constrained_domination_matrix>)->Name("domination/serial")->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(domination_matrix<k::openmp::constrained_domination_matrix>)->Name("domination/openmp")->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(mc_hits<k::serial::mc_hit_count>)->Name("mc_hits/serial")->Arg(100000)->Arg(1000000);
BENCHMARK(mc_hits<k::openmp::mc_hit_count>)->Name("mc_hits/openmp")->Arg(100000)->Arg(1000000);

BENCHMARK_MAIN();
