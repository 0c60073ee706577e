// Serial references vs OpenMP kernels on fixed random instances.

#include <benchmark/benchmark.h>

#include "recount/attacker.hpp"
#include "recount/defender.hpp"
#include "recount/reductions.hpp"

namespace {

using namespace recount;

struct RecountCase {
  Election election;
  Manipulation manipulation;
};

RecountCase recount_case(std::size_t districts) {
  RandomParams params;
  params.rule = Rule::kPluralityOverVoters;
  params.districts = districts;
  params.candidates = 4;
  params.max_voters = 20;
  params.budget_attacker = static_cast<Count>(districts);
  params.budget_defender = static_cast<Count>(districts / 2);
  Election e = gen_random(params, 99);
  Manipulation m = random_manipulation(e, districts, false, 100);
  return {std::move(e), std::move(m)};
}

void BM_EnumerateRecounts(benchmark::State& state, Execution execution) {
  const RecountCase c = recount_case(static_cast<std::size_t>(state.range(0)));
  const RecountGame game(c.election, c.manipulation);
  EnumerationOptions options;
  options.execution = execution;
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_recounts(game, c.election.budget_defender(), options));
  }
}

void BM_ManipulationSearch(benchmark::State& state, Execution execution) {
  RandomParams params;
  params.rule = Rule::kPluralityOverDistricts;
  params.districts = static_cast<std::size_t>(state.range(0));
  params.candidates = 3;
  params.max_voters = 5;
  params.max_weight = 10;
  params.budget_attacker = 3;
  params.budget_defender = 1;
  const Election e = gen_random(params, 7);
  ManipulationOptions options;
  options.execution = execution;
  for (auto _ : state) benchmark::DoNotOptimize(man_decide_brute(e, false, options));
}

void BM_RecountDp(benchmark::State& state) {
  const RecountCase c = recount_case(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(RecountTable(c.election, c.manipulation, c.election.budget_defender()));
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_EnumerateRecounts, serial, Execution::kSerial)->Arg(14)->Arg(18);
BENCHMARK_CAPTURE(BM_EnumerateRecounts, parallel, Execution::kParallel)->Arg(14)->Arg(18);
BENCHMARK(BM_RecountDp)->Arg(14)->Arg(18);
BENCHMARK_CAPTURE(BM_ManipulationSearch, serial, Execution::kSerial)->Arg(8)->Arg(10);
BENCHMARK_CAPTURE(BM_ManipulationSearch, parallel, Execution::kParallel)->Arg(8)->Arg(10);

BENCHMARK_MAIN();
