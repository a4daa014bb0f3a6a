#include "slicesim/topology.hpp"

#include <string>
#include <vector>

#include "slicesim/errors.hpp"

namespace slicesim {

namespace {

void validate(const TopologyConfig& c) {
  if (c.edc_count < 0 || c.cdc_count < 0 || c.ccp_count < 0) {
    throw ConfigError("topology: data center counts must be >= 0");
  }
  if (c.ccp_count > 1) throw ConfigError("topology: at most one CCP is supported");
  if (c.edc_count + c.cdc_count + c.ccp_count == 0) {
    throw ConfigError("topology: at least one data center is required");
  }
  if (c.edc_count > 0 && (c.cdc_count == 0 || c.edc_count % c.cdc_count != 0)) {
    throw ConfigError("topology: edc_count (" + std::to_string(c.edc_count) +
                      ") must be divisible by cdc_count (" + std::to_string(c.cdc_count) + ")");
  }
  auto check_servers = [](int count, int servers, const char* tier) {
    if (count > 0 && servers <= 0) {
      throw ConfigError(std::string("topology: ") + tier + " data centers need servers");
    }
  };
  check_servers(c.edc_count, c.edc_servers, "EDC");
  check_servers(c.cdc_count, c.cdc_servers, "CDC");
  check_servers(c.ccp_count, c.ccp_servers, "CCP");
  for (Units v : {c.edc_cpu, c.edc_ram, c.cdc_cpu, c.cdc_ram, c.ccp_cpu, c.ccp_ram}) {
    if (v <= 0) throw ConfigError("topology: server capacities must be positive");
  }
  for (Units v : {c.bw_server_switch, c.bw_edc_cdc, c.bw_cdc_ring, c.bw_cdc_ccp}) {
    if (v < 0) throw ConfigError("topology: link bandwidths must be >= 0");
  }
}

}  // namespace

PhysicalNetwork build_topology(const TopologyConfig& c) {
  validate(c);
  PhysicalNetwork net;

  struct TierSpec {
    Tier tier;
    int count;
    int servers;
    Units cpu;
    Units ram;
  };
  const TierSpec tiers[] = {
      {Tier::Edc, c.edc_count, c.edc_servers, c.edc_cpu, c.edc_ram},
      {Tier::Cdc, c.cdc_count, c.cdc_servers, c.cdc_cpu, c.cdc_ram},
      {Tier::Ccp, c.ccp_count, c.ccp_servers, c.ccp_cpu, c.ccp_ram},
  };

  std::vector<int> dc_ids;
  for (const auto& t : tiers) {
    for (int i = 0; i < t.count; ++i) {
      const int dc = net.add_data_center(t.tier);
      dc_ids.push_back(dc);
      for (int s = 0; s < t.servers; ++s) net.add_server(dc, t.cpu, t.ram);
    }
  }
  for (int dc : dc_ids) net.add_switch(dc);

  for (const auto& dc : net.data_centers()) {
    for (NodeId s : dc.server_ids) net.add_link(s, dc.switch_id, c.bw_server_switch);
  }

  const auto& dcs = net.data_centers();
  auto switch_of = [&](int dc) { return dcs[dc].switch_id; };
  const int cdc_base = c.edc_count;
  const int ccp_base = c.edc_count + c.cdc_count;

  if (c.edc_count > 0) {
    const int per_cdc = c.edc_count / c.cdc_count;
    for (int e = 0; e < c.edc_count; ++e) {
      net.add_link(switch_of(e), switch_of(cdc_base + e / per_cdc), c.bw_edc_cdc);
    }
  }
  if (c.cdc_count == 2) {
    net.add_link(switch_of(cdc_base), switch_of(cdc_base + 1), c.bw_cdc_ring);
  } else if (c.cdc_count > 2) {
    for (int k = 0; k < c.cdc_count; ++k) {
      net.add_link(switch_of(cdc_base + k), switch_of(cdc_base + (k + 1) % c.cdc_count),
                   c.bw_cdc_ring);
    }
  }
  if (c.ccp_count == 1) {
    for (int k = 0; k < c.cdc_count; ++k) {
      net.add_link(switch_of(cdc_base + k), switch_of(ccp_base), c.bw_cdc_ccp);
    }
  }
  return net;
}

}  // namespace slicesim
