#include <benchmark/benchmark.h>

#include <random>

#include "eigenweight/assembly.hpp"
#include "eigenweight/eigensolver.hpp"
#include "eigenweight/grid.hpp"
#include "eigenweight/optimize.hpp"

using namespace eigenweight;

namespace {

Grid interval(int n) {
  return build_grid({1, {0.0, 0.0}, {1.0, 0.0}}, n, {BcKind::Dirichlet, {}});
}

Weight random_weight(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Weight w{std::vector<double>(static_cast<std::size_t>(g.num_elements())), g.element_measure};
  for (auto& v : w.values) v = unit(rng);
  w.values.front() = 1.5;
  return w;
}

void BM_AssembleStiffness1D(benchmark::State& state) {
  const Grid g = interval(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_stiffness(g));
}
BENCHMARK(BM_AssembleStiffness1D)->Arg(64)->Arg(256)->Arg(1024);

void BM_AssembleStiffness2D(benchmark::State& state) {
  const Grid g = build_grid({2, {0.0, 0.0}, {1.0, 1.0}}, static_cast<int>(state.range(0)),
                            {BcKind::Robin, {1.0}});
  for (auto _ : state) benchmark::DoNotOptimize(assemble_stiffness(g));
}
BENCHMARK(BM_AssembleStiffness2D)->Arg(8)->Arg(16)->Arg(32);

void BM_PrincipalEigenpairDense(benchmark::State& state) {
  const Grid g = interval(static_cast<int>(state.range(0)));
  const StiffnessForm K = assemble_stiffness(g);
  const WeightedMassForm M = assemble_weighted_mass(g, random_weight(g, 1));
  for (auto _ : state) benchmark::DoNotOptimize(principal_eigenpair(K, M));
}
BENCHMARK(BM_PrincipalEigenpairDense)->Arg(32)->Arg(64)->Arg(128)->Arg(256);

void BM_PrincipalEigenpairKrylov(benchmark::State& state) {
  const Grid g = interval(static_cast<int>(state.range(0)));
  const StiffnessForm K = assemble_stiffness(g);
  const WeightedMassForm M = assemble_weighted_mass(g, random_weight(g, 2));
  for (auto _ : state) benchmark::DoNotOptimize(principal_eigenpair(K, M));
}
BENCHMARK(BM_PrincipalEigenpairKrylov)->Arg(600)->Arg(1200);

void BM_MuTildeCached(benchmark::State& state) {
  const Grid g = interval(static_cast<int>(state.range(0)));
  PencilCache cache(g);
  const Weight w = random_weight(g, 3);
  for (auto _ : state) benchmark::DoNotOptimize(cache.mu_tilde_of(w));
}
BENCHMARK(BM_MuTildeCached)->Arg(32)->Arg(64)->Arg(128);

void BM_MinimizeLambda1(benchmark::State& state) {
  const Grid g = interval(static_cast<int>(state.range(0)));
  const RearrangementClass cls = RearrangementClass::from_weight(random_weight(g, 4));
  for (auto _ : state) benchmark::DoNotOptimize(minimize_lambda1(cls, g));
}
BENCHMARK(BM_MinimizeLambda1)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_MaximizeLambda1(benchmark::State& state) {
  const Grid g = interval(static_cast<int>(state.range(0)));
  Weight m0{std::vector<double>(static_cast<std::size_t>(g.num_elements()), -1.0),
            g.element_measure};
  for (int e = 0; e < g.num_elements() / 2; ++e) m0.values[static_cast<std::size_t>(e)] = 2.0;
  const RearrangementClass cls = RearrangementClass::from_weight(m0);
  OptOptions opts;
  opts.tol = 1e-9;
  for (auto _ : state) benchmark::DoNotOptimize(maximize_lambda1(cls, g, opts));
}
BENCHMARK(BM_MaximizeLambda1)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
