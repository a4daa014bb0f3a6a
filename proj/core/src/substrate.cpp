#include "slicesim/substrate.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "slicesim/errors.hpp"

namespace slicesim {

std::string_view tier_name(Tier tier) {
  switch (tier) {
    case Tier::Edc:
      return "EDC";
    case Tier::Cdc:
      return "CDC";
    case Tier::Ccp:
      return "CCP";
  }
  return "?";
}

int PhysicalNetwork::add_data_center(Tier tier) {
  DataCenter dc;
  dc.dc_id = static_cast<int>(data_centers_.size());
  dc.tier = tier;
  data_centers_.push_back(std::move(dc));
  return data_centers_.back().dc_id;
}

NodeId PhysicalNetwork::add_server(int dc_id, Units cpu_capacity, Units ram_capacity) {
  if (!switches_.empty()) {
    throw std::logic_error("servers must be added before switches");
  }
  if (dc_id < 0 || static_cast<std::size_t>(dc_id) >= data_centers_.size()) {
    throw std::invalid_argument("add_server: no data center " + std::to_string(dc_id));
  }
  if (cpu_capacity <= 0 || ram_capacity <= 0) {
    throw std::invalid_argument("add_server: capacities must be positive");
  }
  const auto id = static_cast<NodeId>(servers_.size());
  servers_.push_back(ServerNode{id, dc_id, cpu_capacity, ram_capacity, cpu_capacity, ram_capacity});
  data_centers_[dc_id].server_ids.push_back(id);
  adjacency_.emplace_back();
  return id;
}

NodeId PhysicalNetwork::add_switch(int dc_id) {
  if (dc_id >= 0 && static_cast<std::size_t>(dc_id) >= data_centers_.size()) {
    throw std::invalid_argument("add_switch: no data center " + std::to_string(dc_id));
  }
  const auto id = static_cast<NodeId>(adjacency_.size());
  adjacency_.emplace_back();
  switches_.push_back(id);
  switch_dc_.push_back(dc_id < 0 ? -1 : dc_id);
  if (dc_id >= 0) {
    data_centers_[dc_id].switch_id = id;
  }
  return id;
}

LinkId PhysicalNetwork::add_link(NodeId a, NodeId b, Units bw_capacity) {
  if (!is_node(a) || !is_node(b) || a == b) {
    throw std::invalid_argument("add_link: bad endpoints " + std::to_string(a) + "-" +
                                std::to_string(b));
  }
  if (bw_capacity < 0) {
    throw std::invalid_argument("add_link: negative bandwidth");
  }
  if (find_link(a, b)) {
    throw std::invalid_argument("add_link: duplicate link " + std::to_string(a) + "-" +
                                std::to_string(b));
  }
  const auto id = static_cast<LinkId>(links_.size());
  links_.push_back(Link{id, a, b, bw_capacity, bw_capacity});
  auto insert_sorted = [](std::vector<Adjacency>& adj, Adjacency entry) {
    auto pos = std::lower_bound(adj.begin(), adj.end(), entry.neighbor,
                                [](const Adjacency& x, NodeId n) { return x.neighbor < n; });
    adj.insert(pos, entry);
  };
  insert_sorted(adjacency_[a], {b, id});
  insert_sorted(adjacency_[b], {a, id});
  return id;
}

const ServerNode& PhysicalNetwork::server(NodeId id) const {
  if (!is_server(id)) throw UnknownNode(id);
  return servers_[id];
}

const Link& PhysicalNetwork::link(LinkId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= links_.size()) {
    throw std::out_of_range("no link " + std::to_string(id));
  }
  return links_[id];
}

int PhysicalNetwork::dc_of(NodeId n) const {
  if (is_server(n)) return servers_[n].dc_id;
  if (!is_node(n)) throw UnknownNode(n);
  return switch_dc_[n - static_cast<NodeId>(servers_.size())];
}

std::span<const Adjacency> PhysicalNetwork::neighbors(NodeId n) const {
  if (!is_node(n)) throw UnknownNode(n);
  return adjacency_[n];
}

std::optional<LinkId> PhysicalNetwork::find_link(NodeId a, NodeId b) const {
  if (!is_node(a) || !is_node(b)) return std::nullopt;
  const auto& adj = adjacency_[a];
  auto pos = std::lower_bound(adj.begin(), adj.end(), b,
                              [](const Adjacency& x, NodeId n) { return x.neighbor < n; });
  if (pos != adj.end() && pos->neighbor == b) return pos->link;
  return std::nullopt;
}

bool PhysicalNetwork::connected() const {
  if (adjacency_.empty()) return true;
  std::vector<char> seen(adjacency_.size(), 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    for (const auto& adj : adjacency_[n]) {
      if (!seen[adj.neighbor]) {
        seen[adj.neighbor] = 1;
        ++reached;
        stack.push_back(adj.neighbor);
      }
    }
  }
  return reached == adjacency_.size();
}

Units PhysicalNetwork::max_link_capacity() const {
  Units best = 0;
  for (const auto& l : links_) best = std::max(best, l.bw_capacity);
  return best;
}

namespace {

void check_shape(const PhysicalNetwork& net, const PlacementDecision& d) {
  const std::size_t n = d.vnf_hosts.size();
  if (n == 0 || d.vnf_demands.size() != n || d.vlink_paths.size() != n - 1 ||
      d.vlink_bw.size() != n - 1) {
    throw std::invalid_argument("allocate: decision arrays have inconsistent lengths");
  }
  for (NodeId host : d.vnf_hosts) {
    if (!net.is_server(host)) throw UnknownNode(host);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    NodeId at = d.vnf_hosts[i];
    for (LinkId l : d.vlink_paths[i]) {
      const Link& link = net.link(l);
      if (link.a != at && link.b != at) {
        throw std::invalid_argument("allocate: path " + std::to_string(i) +
                                    " is not contiguous");
      }
      at = link.other(at);
    }
    if (at != d.vnf_hosts[i + 1]) {
      throw std::invalid_argument("allocate: path " + std::to_string(i) +
                                  " does not reach the next host");
    }
  }
}

}  // namespace

void PhysicalNetwork::allocate(SliceId slice_id, const PlacementDecision& decision) {
  if (allocations_.contains(slice_id)) throw DuplicateSlice(slice_id);
  check_shape(*this, decision);

  // Aggregate in first-use order so the first violated resource is reported.
  Allocation record;
  record.decision = decision;
  record.decision.slice_id = slice_id;
  for (std::size_t i = 0; i < decision.vnf_hosts.size(); ++i) {
    const NodeId host = decision.vnf_hosts[i];
    const VnfDemand demand = decision.vnf_demands[i];
    auto it = std::find_if(record.server_debits.begin(), record.server_debits.end(),
                           [host](const auto& e) { return e.first == host; });
    if (it == record.server_debits.end()) {
      record.server_debits.emplace_back(host, demand);
      it = std::prev(record.server_debits.end());
    } else {
      it->second.cpu += demand.cpu;
      it->second.ram += demand.ram;
    }
    const ServerNode& s = servers_[host];
    if (it->second.cpu > s.cpu_available || it->second.ram > s.ram_available) {
      throw InsufficientResources(InsufficientResources::Where::Server, host,
                                  "vnf " + std::to_string(i) + " does not fit");
    }
  }
  for (std::size_t i = 0; i < decision.vlink_paths.size(); ++i) {
    for (LinkId l : decision.vlink_paths[i]) {
      auto it = std::find_if(record.link_debits.begin(), record.link_debits.end(),
                             [l](const auto& e) { return e.first == l; });
      if (it == record.link_debits.end()) {
        record.link_debits.emplace_back(l, decision.vlink_bw[i]);
        it = std::prev(record.link_debits.end());
      } else {
        it->second += decision.vlink_bw[i];
      }
      if (it->second > links_[l].bw_available) {
        throw InsufficientResources(InsufficientResources::Where::Link, l,
                                    "vlink " + std::to_string(i) + " does not fit");
      }
    }
  }

  std::sort(record.server_debits.begin(), record.server_debits.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  std::sort(record.link_debits.begin(), record.link_debits.end());
  for (const auto& [host, demand] : record.server_debits) {
    servers_[host].cpu_available -= demand.cpu;
    servers_[host].ram_available -= demand.ram;
  }
  for (const auto& [l, bw] : record.link_debits) {
    links_[l].bw_available -= bw;
  }
  allocations_.emplace(slice_id, std::move(record));
}

void PhysicalNetwork::release(SliceId slice_id) {
  auto it = allocations_.find(slice_id);
  if (it == allocations_.end()) throw UnknownSlice(slice_id);
  for (const auto& [host, demand] : it->second.server_debits) {
    servers_[host].cpu_available += demand.cpu;
    servers_[host].ram_available += demand.ram;
  }
  for (const auto& [l, bw] : it->second.link_debits) {
    links_[l].bw_available += bw;
  }
  allocations_.erase(it);
}

bool TentativeDebit::debit(NodeId server, VnfDemand demand) {
  if (!net_->is_server(server)) throw UnknownNode(server);
  ServerNode& s = net_->servers_[server];
  if (demand.cpu > s.cpu_available || demand.ram > s.ram_available) return false;
  s.cpu_available -= demand.cpu;
  s.ram_available -= demand.ram;
  debits_.emplace_back(server, demand);
  return true;
}

void TentativeDebit::restore() {
  for (auto it = debits_.rbegin(); it != debits_.rend(); ++it) {
    ServerNode& s = net_->servers_[it->first];
    s.cpu_available += it->second.cpu;
    s.ram_available += it->second.ram;
  }
  debits_.clear();
}

UtilizationSummary utilization(const PhysicalNetwork& net) {
  struct Sums {
    Units cpu_avail = 0, cpu_cap = 0, ram_avail = 0, ram_cap = 0, bw_avail = 0, bw_cap = 0;
  };
  Sums overall;
  std::array<Sums, kTierCount> tiers{};
  const auto& dcs = net.data_centers();

  for (const auto& s : net.servers()) {
    for (Sums* sums : {&overall, &tiers[static_cast<std::size_t>(dcs[s.dc_id].tier)]}) {
      sums->cpu_avail += s.cpu_available;
      sums->cpu_cap += s.cpu_capacity;
      sums->ram_avail += s.ram_available;
      sums->ram_cap += s.ram_capacity;
    }
  }
  for (const auto& l : net.links()) {
    overall.bw_avail += l.bw_available;
    overall.bw_cap += l.bw_capacity;
    int tier = -1;
    for (NodeId end : {l.a, l.b}) {
      const int dc = net.dc_of(end);
      if (dc >= 0) tier = std::max(tier, static_cast<int>(dcs[dc].tier));
    }
    if (tier >= 0) {
      tiers[tier].bw_avail += l.bw_available;
      tiers[tier].bw_cap += l.bw_capacity;
    }
  }

  auto ratio = [](Units avail, Units cap) {
    return cap > 0 ? 1.0 - static_cast<double>(avail) / static_cast<double>(cap) : 0.0;
  };
  auto to_util = [&](const Sums& s) {
    return ResourceUtilization{ratio(s.cpu_avail, s.cpu_cap), ratio(s.ram_avail, s.ram_cap),
                               ratio(s.bw_avail, s.bw_cap)};
  };
  UtilizationSummary out;
  out.overall = to_util(overall);
  for (std::size_t t = 0; t < kTierCount; ++t) out.per_tier[t] = to_util(tiers[t]);
  return out;
}

}  // namespace slicesim
