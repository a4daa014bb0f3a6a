#include <benchmark/benchmark.h>

#include "slicesim/agent.hpp"
#include "slicesim/p2c.hpp"
#include "slicesim/placement.hpp"
#include "slicesim/topology.hpp"
#include "slicesim/traffic.hpp"

using namespace slicesim;

namespace {

void BM_BuildTopology(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_topology(TopologyConfig{}));
}
BENCHMARK(BM_BuildTopology)->Unit(benchmark::kMicrosecond);

// First server of the first EDC to the last server, which sits in the CCP.
void BM_ShortestPath(benchmark::State& state) {
  const PhysicalNetwork net = build_topology(TopologyConfig{});
  const auto last = static_cast<NodeId>(net.server_count()) - 1;
  for (auto _ : state) benchmark::DoNotOptimize(shortest_feasible_path(net, 0, last, 1));
}
BENCHMARK(BM_ShortestPath)->Unit(benchmark::kMicrosecond);

void BM_P2cSelect(benchmark::State& state) {
  const PhysicalNetwork net = build_topology(TopologyConfig{});
  const PowerOfTwoChoices p2c(net);
  Rng rng = make_stream(1, 7);
  const std::optional<NodeId> prev =
      state.range(0) ? std::optional<NodeId>(17) : std::nullopt;
  for (auto _ : state) benchmark::DoNotOptimize(p2c.select(net, 2, 2, prev, rng));
}
BENCHMARK(BM_P2cSelect)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

// One VNF decision: featurize, mask, actor forward, heuristic shift, sample.
void BM_AgentDecision(benchmark::State& state) {
  const PhysicalNetwork net = build_topology(TopologyConfig{});
  Rng rng = make_stream(1, 7);
  const Agent agent(net, AgentVariant::haedrl(), TrainingConfig{}, RewardConfig{}, rng);
  const PowerOfTwoChoices p2c(net);
  const Nspr nspr = sample_nspr(NsprTemplate{}, 0, 0.0, rng);
  for (auto _ : state) {
    const Eigen::VectorXd s = featurize(net, nspr, 1, NodeId{3}, {0.5, 0.1}, agent.variant());
    const ActionMask mask = feasibility_mask(net, nspr.vnfs[1]);
    const Eigen::VectorXd logits = policy_forward(agent.actor(), s, mask);
    const std::vector<double> h = p2c.scores(net, nspr, 1, NodeId{3}, rng);
    benchmark::DoNotOptimize(select_action(ha_distribution(logits, h, 5.0), rng));
  }
}
BENCHMARK(BM_AgentDecision)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
