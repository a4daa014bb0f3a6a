#include "slicesim/p2c.hpp"

#include <algorithm>
#include <stdexcept>

#include "slicesim/placement.hpp"

namespace slicesim {

HopDistances::HopDistances(const PhysicalNetwork& net) : servers_(net.server_count()) {
  table_.assign(servers_ * servers_, kUnreachable);
  std::vector<std::uint16_t> dist(net.node_count());
  std::vector<NodeId> queue;
  queue.reserve(net.node_count());
  for (std::size_t s = 0; s < servers_; ++s) {
    std::fill(dist.begin(), dist.end(), kUnreachable);
    queue.clear();
    queue.push_back(static_cast<NodeId>(s));
    dist[s] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const NodeId n = queue[head];
      for (const auto& adj : net.neighbors(n)) {
        if (dist[adj.neighbor] == kUnreachable) {
          dist[adj.neighbor] = static_cast<std::uint16_t>(dist[n] + 1);
          queue.push_back(adj.neighbor);
        }
      }
    }
    std::copy(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(servers_),
              table_.begin() + static_cast<std::ptrdiff_t>(s * servers_));
    for (std::size_t t = 0; t < servers_; ++t) {
      if (dist[t] != kUnreachable) diameter_ = std::max<int>(diameter_, dist[t]);
    }
  }
}

bool less_loaded_after(const ServerNode& a, const ServerNode& b, Units cpu) {
  // (used_a + cpu) / cap_a  vs  (used_b + cpu) / cap_b, cross-multiplied.
  const Units lhs = (a.cpu_capacity - a.cpu_available + cpu) * b.cpu_capacity;
  const Units rhs = (b.cpu_capacity - b.cpu_available + cpu) * a.cpu_capacity;
  if (lhs != rhs) return lhs < rhs;
  return a.server_id < b.server_id;
}

PowerOfTwoChoices::PowerOfTwoChoices(const PhysicalNetwork& net, P2cConfig config)
    : distances_(net), config_(config) {
  if (config_.candidate_k < 1) throw std::invalid_argument("p2c: candidate_k must be >= 1");
}

std::optional<NodeId> PowerOfTwoChoices::select(const PhysicalNetwork& net, Units cpu,
                                                Units ram, std::optional<NodeId> prev_host,
                                                Rng& rng, bool exclude_prev) const {
  std::vector<NodeId> pool = candidate_nodes(net, cpu, ram);
  if (exclude_prev && prev_host) std::erase(pool, *prev_host);
  if (pool.empty()) return std::nullopt;
  if (prev_host && pool.size() > static_cast<std::size_t>(config_.candidate_k)) {
    const NodeId from = *prev_host;
    auto nearer = [&](NodeId x, NodeId y) {
      const auto dx = distances_.between(from, x);
      const auto dy = distances_.between(from, y);
      return dx != dy ? dx < dy : x < y;
    };
    const auto k = static_cast<std::ptrdiff_t>(config_.candidate_k);
    std::nth_element(pool.begin(), pool.begin() + k - 1, pool.end(), nearer);
    pool.resize(static_cast<std::size_t>(k));
    std::sort(pool.begin(), pool.end(), nearer);
  }
  if (pool.size() == 1) return pool.front();

  const auto n = static_cast<std::int64_t>(pool.size());
  const std::int64_t i = std::uniform_int_distribution<std::int64_t>(0, n - 1)(rng);
  std::int64_t j = std::uniform_int_distribution<std::int64_t>(0, n - 2)(rng);
  if (j >= i) ++j;
  const ServerNode& a = net.server(pool[static_cast<std::size_t>(i)]);
  const ServerNode& b = net.server(pool[static_cast<std::size_t>(j)]);
  return less_loaded_after(a, b, cpu) ? a.server_id : b.server_id;
}

std::vector<double> PowerOfTwoChoices::scores(const PhysicalNetwork& net, const Nspr& nspr,
                                              int vnf_index, std::optional<NodeId> prev_host,
                                              Rng& rng) const {
  if (vnf_index < 0 || vnf_index >= nspr.vnf_count()) {
    throw std::out_of_range("p2c scores: vnf_index out of range");
  }
  std::vector<double> h(net.server_count(), 0.0);
  const VnfDemand& d = nspr.vnfs[static_cast<std::size_t>(vnf_index)];
  if (auto pick = select(net, d.cpu, d.ram, prev_host, rng)) h[*pick] = 1.0;
  return h;
}

}  // namespace slicesim
