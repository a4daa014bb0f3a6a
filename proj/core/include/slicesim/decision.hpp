#pragma once

#include <cstdint>
#include <vector>

namespace slicesim {

using Units = std::int64_t;
using NodeId = std::int32_t;
using LinkId = std::int32_t;
using SliceId = std::int64_t;

// Links traversed from one VNF host to the next, in order.
using Path = std::vector<LinkId>;

struct VnfDemand {
  Units cpu = 0;
  Units ram = 0;

  friend bool operator==(const VnfDemand&, const VnfDemand&) = default;
};

// A complete placement of one slice: where each VNF runs and which physical
// path carries each virtual link. The demands travel with the decision so it
// can be applied to (and later removed from) a network on its own.
struct PlacementDecision {
  SliceId slice_id = 0;
  std::vector<NodeId> vnf_hosts;
  std::vector<Path> vlink_paths;
  std::vector<VnfDemand> vnf_demands;
  std::vector<Units> vlink_bw;

  friend bool operator==(const PlacementDecision&, const PlacementDecision&) = default;
};

}  // namespace slicesim
