#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "slicesim/rng.hpp"
#include "slicesim/substrate.hpp"
#include "slicesim/traffic.hpp"

namespace slicesim {

// Server-to-server hop counts on the unfiltered graph. Topology is fixed for
// a run, so this is computed once.
class HopDistances {
 public:
  static constexpr std::uint16_t kUnreachable = 0xFFFF;

  HopDistances() = default;
  explicit HopDistances(const PhysicalNetwork& net);

  std::uint16_t between(NodeId a, NodeId b) const {
    return table_[static_cast<std::size_t>(a) * servers_ + static_cast<std::size_t>(b)];
  }
  std::size_t server_count() const { return servers_; }
  // Largest finite server-to-server distance.
  int diameter() const { return diameter_; }

 private:
  std::size_t servers_ = 0;
  int diameter_ = 0;
  std::vector<std::uint16_t> table_;
};

struct P2cConfig {
  int candidate_k = 32;

  friend bool operator==(const P2cConfig&, const P2cConfig&) = default;
};

// Power of two choices over the feasible servers. With a previous host the
// candidate set is first cut to the K servers nearest to it.
class PowerOfTwoChoices {
 public:
  PowerOfTwoChoices(const PhysicalNetwork& net, P2cConfig config = {});

  // With exclude_prev the previous host itself is not a candidate (used when
  // consecutive VNFs may not share a server).
  std::optional<NodeId> select(const PhysicalNetwork& net, Units cpu, Units ram,
                               std::optional<NodeId> prev_host, Rng& rng,
                               bool exclude_prev = false) const;

  // One-hot at the selected server, all zero when nothing fits.
  std::vector<double> scores(const PhysicalNetwork& net, const Nspr& nspr, int vnf_index,
                             std::optional<NodeId> prev_host, Rng& rng) const;

  const HopDistances& distances() const { return distances_; }
  const P2cConfig& config() const { return config_; }

 private:
  HopDistances distances_;
  P2cConfig config_;
};

// True when placing `cpu` on a leaves it strictly less utilized than placing
// it on b would leave b; exact integer comparison, ties go to the lower id.
bool less_loaded_after(const ServerNode& a, const ServerNode& b, Units cpu);

}  // namespace slicesim
