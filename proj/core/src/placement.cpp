#include "slicesim/placement.hpp"

#include <algorithm>
#include <stdexcept>

#include "slicesim/errors.hpp"

namespace slicesim {

std::vector<NodeId> candidate_nodes(const PhysicalNetwork& net, Units cpu, Units ram) {
  std::vector<NodeId> out;
  for (const auto& s : net.servers()) {
    if (s.cpu_available >= cpu && s.ram_available >= ram) out.push_back(s.server_id);
  }
  return out;
}

std::optional<Path> shortest_feasible_path(const PhysicalNetwork& net, NodeId src, NodeId dst,
                                           Units bw_demand) {
  return shortest_feasible_path(net, src, dst, bw_demand, {});
}

std::optional<Path> shortest_feasible_path(const PhysicalNetwork& net, NodeId src, NodeId dst,
                                           Units bw_demand, std::span<const Units> claimed) {
  if (!net.is_server(src)) throw UnknownNode(src);
  if (!net.is_server(dst)) throw UnknownNode(dst);
  if (src == dst) return Path{};

  // Breadth-first search with neighbors visited in ascending id order. The
  // first node to reach v in the previous layer is the one whose own path is
  // lexicographically smallest, so parent links encode the smallest path.
  constexpr LinkId kUnseen = -2;
  std::vector<LinkId> via(net.node_count(), kUnseen);
  std::vector<NodeId> queue;
  queue.reserve(net.node_count());
  queue.push_back(src);
  via[src] = -1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId n = queue[head];
    for (const auto& adj : net.neighbors(n)) {
      if (via[adj.neighbor] != kUnseen) continue;
      const Link& l = net.link(adj.link);
      const Units spare = l.bw_available - (claimed.empty() ? 0 : claimed[adj.link]);
      if (spare < bw_demand) continue;
      via[adj.neighbor] = adj.link;
      if (adj.neighbor == dst) {
        Path path;
        for (NodeId at = dst; at != src;) {
          const LinkId li = via[at];
          path.push_back(li);
          at = net.link(li).other(at);
        }
        std::reverse(path.begin(), path.end());
        return path;
      }
      queue.push_back(adj.neighbor);
    }
  }
  return std::nullopt;
}

PlacementResult assemble_decision(const PhysicalNetwork& net, const Nspr& nspr,
                                  std::span<const NodeId> vnf_hosts,
                                  const PlacementOptions& options) {
  const std::size_t n = nspr.vnfs.size();
  if (vnf_hosts.size() != n) {
    throw std::invalid_argument("assemble_decision: need one host per VNF");
  }
  for (NodeId h : vnf_hosts) {
    if (!net.is_server(h)) throw UnknownNode(h);
  }

  // Joint node feasibility, in chain order.
  std::vector<std::pair<NodeId, VnfDemand>> used;
  for (std::size_t i = 0; i < n; ++i) {
    const NodeId h = vnf_hosts[i];
    if (!options.allow_colocation && i > 0 && vnf_hosts[i - 1] == h) {
      return Rejection{Rejection::Reason::Colocation, static_cast<int>(i)};
    }
    auto it = std::find_if(used.begin(), used.end(), [h](const auto& e) { return e.first == h; });
    if (it == used.end()) {
      used.emplace_back(h, VnfDemand{});
      it = std::prev(used.end());
    }
    it->second.cpu += nspr.vnfs[i].cpu;
    it->second.ram += nspr.vnfs[i].ram;
    const ServerNode& s = net.server(h);
    if (it->second.cpu > s.cpu_available || it->second.ram > s.ram_available) {
      return Rejection{Rejection::Reason::NodeCapacity, static_cast<int>(i)};
    }
  }

  PlacementDecision d;
  d.slice_id = nspr.slice_id;
  d.vnf_hosts.assign(vnf_hosts.begin(), vnf_hosts.end());
  d.vnf_demands = nspr.vnfs;
  d.vlink_bw = nspr.vlinks;
  d.vlink_paths.reserve(n > 0 ? n - 1 : 0);

  std::vector<Units> claimed;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    auto path = shortest_feasible_path(net, vnf_hosts[i], vnf_hosts[i + 1], nspr.vlinks[i],
                                       claimed);
    if (!path) return Rejection{Rejection::Reason::NoPath, static_cast<int>(i)};
    if (!path->empty()) {
      if (claimed.empty()) claimed.assign(net.links().size(), 0);
      for (LinkId l : *path) claimed[l] += nspr.vlinks[i];
    }
    d.vlink_paths.push_back(std::move(*path));
  }
  return d;
}

DecisionCost decision_cost(const PhysicalNetwork& net, const PlacementDecision& decision) {
  DecisionCost cost;
  for (std::size_t i = 0; i < decision.vlink_paths.size(); ++i) {
    cost.total_bw_consumed +=
        decision.vlink_bw[i] * static_cast<Units>(decision.vlink_paths[i].size());
  }
  std::vector<std::pair<NodeId, Units>> cpu_by_host;
  for (std::size_t i = 0; i < decision.vnf_hosts.size(); ++i) {
    const NodeId h = decision.vnf_hosts[i];
    auto it = std::find_if(cpu_by_host.begin(), cpu_by_host.end(),
                           [h](const auto& e) { return e.first == h; });
    if (it == cpu_by_host.end()) {
      cpu_by_host.emplace_back(h, decision.vnf_demands[i].cpu);
    } else {
      it->second += decision.vnf_demands[i].cpu;
    }
  }
  cost.servers_touched = static_cast<int>(cpu_by_host.size());
  for (const auto& [h, cpu] : cpu_by_host) {
    const ServerNode& s = net.server(h);
    const double used = static_cast<double>(s.cpu_capacity - s.cpu_available + cpu);
    const double util = std::clamp(used / static_cast<double>(s.cpu_capacity), 0.0, 1.0);
    cost.max_server_utilization_after = std::max(cost.max_server_utilization_after, util);
  }
  return cost;
}

}  // namespace slicesim
