#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slicesim/agent.hpp"
#include "slicesim/metrics.hpp"
#include "slicesim/mlp.hpp"
#include "slicesim/p2c.hpp"
#include "slicesim/placement.hpp"
#include "slicesim/topology.hpp"
#include "slicesim/traffic.hpp"

namespace slicesim {

enum class Algorithm { Random, P2c, Drl, Edrl, HaDrl, HaEdrl };

// Throws ConfigError for unknown names.
Algorithm parse_algorithm(std::string_view name);
std::string_view algorithm_name(Algorithm algo);
std::optional<AgentVariant> agent_variant(Algorithm algo);

enum class PhaseMode { Train, Eval };

struct PhaseBlock {
  long long arrivals = 1;
  PhaseMode mode = PhaseMode::Train;

  friend bool operator==(const PhaseBlock&, const PhaseBlock&) = default;
};

struct MetricsConfig {
  int window = 100;
  int sample_every = 1;

  friend bool operator==(const MetricsConfig&, const MetricsConfig&) = default;
};

struct RunConfig {
  long long arrivals = 1000;
  // Consecutive arrival blocks; arrivals past the last block keep its mode.
  // Empty means train throughout.
  std::vector<PhaseBlock> phases;
  std::uint64_t seed = 1;
  Algorithm algorithm = Algorithm::P2c;
  // Verify resource conservation after every event (slow on big networks).
  bool check_conservation = false;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct SimConfig {
  TopologyConfig topology;
  LoadModel load;
  NsprTemplate nspr;
  PlacementOptions placement;
  P2cConfig p2c;
  TrainingConfig training;
  RewardConfig reward;
  MetricsConfig metrics;
  RunConfig run;

  // Throws ConfigError.
  void validate() const;
  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct ArrivalRecord {
  SliceId slice_id = 0;
  double time = 0.0;
  bool accepted = false;
  Algorithm algorithm = Algorithm::P2c;
  PhaseMode mode = PhaseMode::Train;
  double reward = 0.0;
  // Hosts chosen VNF by VNF; shorter than the chain when a VNF had nowhere to go.
  std::vector<NodeId> hosts;
  std::optional<Rejection> rejection;

  friend bool operator==(const ArrivalRecord&, const ArrivalRecord&) = default;
};

struct PhaseSummary {
  PhaseMode mode = PhaseMode::Train;
  long long arrivals = 0;
  long long accepted = 0;
  std::uint64_t params_before = 0;
  std::uint64_t params_after = 0;

  friend bool operator==(const PhaseSummary&, const PhaseSummary&) = default;
};

struct LatencyStats {
  double median_ms = 0.0;
  double p95_ms = 0.0;
  double mean_ms = 0.0;
  double max_ms = 0.0;
};

struct RunReport {
  Algorithm algorithm = Algorithm::P2c;
  std::uint64_t seed = 0;
  std::vector<Nspr> arrivals;
  std::vector<ArrivalRecord> records;
  long long accepted = 0;
  long long departures = 0;
  double cumulative_acceptance = 0.0;
  double mean_reward = 0.0;
  std::vector<PhaseSummary> phases;
  MetricsSeries series;
  PhysicalNetwork final_network;
  std::optional<PlacementDecision> last_decision;
  std::optional<Mlp> actor;
  std::optional<Mlp> critic;

  // Wall-clock fields; excluded from determinism comparisons.
  double wall_ms = 0.0;
  LatencyStats latency;
};

// Everything in two reports except the wall-clock fields and the algorithm
// label.
bool same_outcome(const RunReport& a, const RunReport& b);

// One online simulation run. Throws ConfigError for invalid configs.
RunReport run(const SimConfig& config);

struct ComparisonReport {
  std::vector<RunReport> runs;
};

// Runs each config on an identical arrival sequence. All configs must agree
// on topology, traffic, seed, and arrival count. Up to `jobs` runs proceed in
// parallel.
ComparisonReport compare(const std::vector<SimConfig>& configs, int jobs = 1);

}  // namespace slicesim
