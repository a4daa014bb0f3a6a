#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "slicesim/decision.hpp"
#include "slicesim/substrate.hpp"
#include "slicesim/traffic.hpp"

namespace slicesim {

struct PlacementOptions {
  bool allow_colocation = true;

  friend bool operator==(const PlacementOptions&, const PlacementOptions&) = default;
};

struct Rejection {
  enum class Reason { NodeCapacity, NoPath, Colocation };
  Reason reason = Reason::NodeCapacity;
  // VNF index for NodeCapacity/Colocation, virtual link index for NoPath.
  int index = 0;

  friend bool operator==(const Rejection&, const Rejection&) = default;
};

using PlacementResult = std::variant<PlacementDecision, Rejection>;

struct DecisionCost {
  Units total_bw_consumed = 0;
  double max_server_utilization_after = 0.0;
  int servers_touched = 0;
};

// Servers able to host (cpu, ram), ascending by id.
std::vector<NodeId> candidate_nodes(const PhysicalNetwork& net, Units cpu, Units ram);

// Minimum-hop path from src to dst over links with at least bw_demand spare
// bandwidth; ties go to the lexicographically smallest node sequence.
// Throws UnknownNode if either end is not a server.
std::optional<Path> shortest_feasible_path(const PhysicalNetwork& net, NodeId src, NodeId dst,
                                           Units bw_demand);

// Same search with `claimed[l]` bandwidth already spoken for on link l.
std::optional<Path> shortest_feasible_path(const PhysicalNetwork& net, NodeId src, NodeId dst,
                                           Units bw_demand, std::span<const Units> claimed);

// Checks the hosts jointly, then routes each virtual link in chain order,
// charging earlier links of the same slice against the bandwidth seen by
// later ones. The returned decision always allocates cleanly on `net`.
PlacementResult assemble_decision(const PhysicalNetwork& net, const Nspr& nspr,
                                  std::span<const NodeId> vnf_hosts,
                                  const PlacementOptions& options = {});

// Cost of applying `decision` to `net` (which must not yet hold it).
DecisionCost decision_cost(const PhysicalNetwork& net, const PlacementDecision& decision);

}  // namespace slicesim
