#include <benchmark/benchmark.h>

#include <memory>

#include "ocf/access_graph.hpp"
#include "ocf/infinite_policies.hpp"
#include "ocf/partitioning.hpp"
#include "ocf/policy_spec.hpp"
#include "ocf/reward_model.hpp"
#include "ocf/sim_finite.hpp"
#include "ocf/sim_infinite.hpp"

namespace {

using namespace ocf;

void BM_BalancedSemiMatching(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  AccessGraph g = RandomBipartite(n, 4 * n, 8.0 / static_cast<double>(n), rng);
  for (auto _ : state) benchmark::DoNotOptimize(BalancedSemiMatching(g).max_load);
  state.SetComplexityN(static_cast<int64_t>(g.num_edges()));
}
BENCHMARK(BM_BalancedSemiMatching)->Arg(64)->Arg(256)->Arg(1024)->Complexity();

void BM_FiniteTrial(benchmark::State& state, const char* spec) {
  AccessGraph g = HatGraph(static_cast<std::size_t>(state.range(0)));
  RewardModel model = RewardModel::Planted(g.num_items(), {0});
  auto policy = MakeFinitePolicyMaker(PolicySpec::Parse(spec), g)();
  FiniteOptions opt;
  opt.r = 2;
  std::size_t trial = 0;
  for (auto _ : state) {
    FiniteTrial t = RunFiniteTrial(g, model, *policy, opt, 7, trial++);
    benchmark::DoNotOptimize(t.reward.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK_CAPTURE(BM_FiniteTrial, bpexp, "bpexp")->Arg(64)->Arg(256);
BENCHMARK_CAPTURE(BM_FiniteTrial, idexp, "idexp")->Arg(64)->Arg(256);
BENCHMARK_CAPTURE(BM_FiniteTrial, degree_power, "degree_power(-0.5)")->Arg(64)->Arg(256);

void BM_InfiniteRun(benchmark::State& state) {
  AccessGraph g = Biregular(8, 16, 4);
  InfiniteConfig cfg;
  cfg.horizon = static_cast<double>(state.range(0));
  RewardModel model = RewardModel::Sequences(
      std::vector<ValueSequence>(16, ValueSequence::Geometric(0.5, 0.5)));
  UlExpPolicy policy;
  std::size_t trial = 0;
  std::size_t visits = 0;
  for (auto _ : state) {
    InfiniteRun run = RunInfinite(g, cfg, model, policy, 3, trial++);
    visits += run.visits.size();
  }
  state.SetItemsProcessed(static_cast<int64_t>(visits));
}
BENCHMARK(BM_InfiniteRun)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
