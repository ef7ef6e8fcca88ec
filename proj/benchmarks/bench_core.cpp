#include <benchmark/benchmark.h>

#include <random>

#include "isacbb/bnb.hpp"
#include "isacbb/closed_form.hpp"
#include "isacbb/gnn.hpp"
#include "isacbb/mer_solver.hpp"
#include "isacbb/relaxation.hpp"

using namespace isacbb;

namespace {

ProblemInstance instance(int k, int nt, std::uint64_t seed, double dbm = 30.0) {
  ScenarioParams p;
  p.num_users = k;
  p.num_tx = nt;
  p.seed = seed;
  p.power_dbm = dbm;
  return gen_scenario1(p);
}

void BM_Eig(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  ComplexMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = {g(rng), g(rng)};
  const HermitianMatrix h(a + a.adjoint());
  for (auto _ : state) benchmark::DoNotOptimize(eig(h));
}
BENCHMARK(BM_Eig)->Arg(4)->Arg(6)->Arg(12);

void BM_SingleUser(benchmark::State& state) {
  const ProblemInstance inst = instance(1, 6, 3);
  for (auto _ : state) benchmark::DoNotOptimize(solve_single_user(inst));
}
BENCHMARK(BM_SingleUser);

void BM_MerRoot(benchmark::State& state) {
  const ProblemInstance inst = instance(static_cast<int>(state.range(0)), 6, 5);
  const MerProblem p = MerProblem::make(inst, root_box(inst));
  for (auto _ : state) benchmark::DoNotOptimize(solve_mer(p));
}
BENCHMARK(BM_MerRoot)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_PolicyScore(benchmark::State& state) {
  const ProblemInstance inst = instance(3, 6, 7);
  BnbNode node;
  node.box = root_box(inst);
  node.relaxation = solve_mer(MerProblem::make(inst, node.box));
  node.lower_bound = node.relaxation.value;
  const FeasibleSolution rep = repair(node.relaxation, node.box, inst);
  const NodeGraph g = extract_features(node, rep, SearchState{node.lower_bound, rep.value, 1e-3, &rep}, inst);
  const GnnWeights w = GnnWeights::zeros(3, 64);
  for (auto _ : state) benchmark::DoNotOptimize(policy_score(g, w));
}
BENCHMARK(BM_PolicyScore);

void BM_BnbSmall(benchmark::State& state) {
  const ProblemInstance inst = instance(2, 4, 11, 20.0);
  BnbOptions o;
  o.parallel = false;
  for (auto _ : state) benchmark::DoNotOptimize(solve_bnb(inst, o));
}
BENCHMARK(BM_BnbSmall)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
