#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "slicesim/decision.hpp"

namespace slicesim {

enum class Tier : std::uint8_t { Edc = 0, Cdc = 1, Ccp = 2 };
inline constexpr std::size_t kTierCount = 3;

std::string_view tier_name(Tier tier);

struct DataCenter {
  int dc_id = 0;
  Tier tier = Tier::Edc;
  std::vector<NodeId> server_ids;
  NodeId switch_id = -1;

  friend bool operator==(const DataCenter&, const DataCenter&) = default;
};

struct ServerNode {
  NodeId server_id = 0;
  int dc_id = 0;
  Units cpu_capacity = 0;
  Units ram_capacity = 0;
  Units cpu_available = 0;
  Units ram_available = 0;

  friend bool operator==(const ServerNode&, const ServerNode&) = default;
};

struct Link {
  LinkId link_id = 0;
  NodeId a = 0;
  NodeId b = 0;
  Units bw_capacity = 0;
  Units bw_available = 0;

  NodeId other(NodeId n) const { return n == a ? b : a; }

  friend bool operator==(const Link&, const Link&) = default;
};

struct Adjacency {
  NodeId neighbor = 0;
  LinkId link = 0;

  friend bool operator==(const Adjacency&, const Adjacency&) = default;
};

// What an active slice holds, aggregated per resource so release() can undo
// it exactly.
struct Allocation {
  PlacementDecision decision;
  std::vector<std::pair<NodeId, VnfDemand>> server_debits;
  std::vector<std::pair<LinkId, Units>> link_debits;

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

// The physical substrate: data centers, servers, switches, links, and the
// ledger of resources currently held by placed slices.
//
// Node ids form one space. Servers occupy [0, server_count()) so a server id
// doubles as an index into servers(); switches follow. All servers must be
// added before the first switch.
class PhysicalNetwork {
 public:
  int add_data_center(Tier tier);
  NodeId add_server(int dc_id, Units cpu_capacity, Units ram_capacity);
  // dc_id < 0 creates a switch that belongs to no data center.
  NodeId add_switch(int dc_id = -1);
  LinkId add_link(NodeId a, NodeId b, Units bw_capacity);

  const std::vector<DataCenter>& data_centers() const { return data_centers_; }
  const std::vector<ServerNode>& servers() const { return servers_; }
  const std::vector<NodeId>& switches() const { return switches_; }
  const std::vector<Link>& links() const { return links_; }
  const std::map<SliceId, Allocation>& allocations() const { return allocations_; }

  const ServerNode& server(NodeId id) const;
  const Link& link(LinkId id) const;

  std::size_t server_count() const { return servers_.size(); }
  std::size_t node_count() const { return adjacency_.size(); }
  bool is_server(NodeId n) const {
    return n >= 0 && static_cast<std::size_t>(n) < servers_.size();
  }
  bool is_node(NodeId n) const {
    return n >= 0 && static_cast<std::size_t>(n) < adjacency_.size();
  }
  // Data center of a server or switch; -1 for free-standing switches.
  int dc_of(NodeId n) const;

  // Neighbors in ascending node id order.
  std::span<const Adjacency> neighbors(NodeId n) const;
  std::optional<LinkId> find_link(NodeId a, NodeId b) const;
  bool connected() const;

  Units max_link_capacity() const;

  // All-or-nothing. Throws DuplicateSlice, InsufficientResources, or
  // std::invalid_argument for a structurally malformed decision.
  void allocate(SliceId slice_id, const PlacementDecision& decision);
  // Exact inverse of the matching allocate(). Throws UnknownSlice.
  void release(SliceId slice_id);
  bool holds(SliceId slice_id) const { return allocations_.contains(slice_id); }

  friend bool operator==(const PhysicalNetwork&, const PhysicalNetwork&) = default;

 private:
  friend class TentativeDebit;

  std::vector<DataCenter> data_centers_;
  std::vector<ServerNode> servers_;
  std::vector<NodeId> switches_;
  std::vector<int> switch_dc_;
  std::vector<Link> links_;
  std::vector<std::vector<Adjacency>> adjacency_;
  std::map<SliceId, Allocation> allocations_;
};

// Temporarily takes CPU/RAM off servers while the hosts of a multi-VNF slice
// are being chosen one at a time, so later choices see earlier ones. Every
// debit is returned when the object goes out of scope (or on restore()).
class TentativeDebit {
 public:
  explicit TentativeDebit(PhysicalNetwork& net) : net_(&net) {}
  ~TentativeDebit() { restore(); }
  TentativeDebit(const TentativeDebit&) = delete;
  TentativeDebit& operator=(const TentativeDebit&) = delete;

  // Returns false (and debits nothing) if the server cannot cover the demand.
  bool debit(NodeId server, VnfDemand demand);
  void restore();

 private:
  PhysicalNetwork* net_;
  std::vector<std::pair<NodeId, VnfDemand>> debits_;
};

struct ResourceUtilization {
  double cpu = 0.0;
  double ram = 0.0;
  double bw = 0.0;
};

struct UtilizationSummary {
  ResourceUtilization overall;
  // Indexed by Tier. Inter-DC links count toward the higher tier of their two
  // endpoints.
  std::array<ResourceUtilization, kTierCount> per_tier{};
};

UtilizationSummary utilization(const PhysicalNetwork& net);

}  // namespace slicesim
