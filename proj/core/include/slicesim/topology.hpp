#pragma once

#include "slicesim/substrate.hpp"

namespace slicesim {

// Three-tier substrate: edge DCs hang off core DCs, core DCs form a ring and
// each connects to the central cloud platform. Defaults give 15 EDC, 5 CDC,
// and 1 CCP hosting 1008 servers.
struct TopologyConfig {
  int edc_count = 15;
  int cdc_count = 5;
  int ccp_count = 1;

  int edc_servers = 16;
  int cdc_servers = 64;
  int ccp_servers = 448;

  Units edc_cpu = 8;
  Units edc_ram = 16;
  Units cdc_cpu = 16;
  Units cdc_ram = 32;
  Units ccp_cpu = 32;
  Units ccp_ram = 64;

  Units bw_server_switch = 100;
  Units bw_edc_cdc = 200;
  Units bw_cdc_ring = 400;
  Units bw_cdc_ccp = 400;

  friend bool operator==(const TopologyConfig&, const TopologyConfig&) = default;
};

// Throws ConfigError on an invalid tier layout.
PhysicalNetwork build_topology(const TopologyConfig& config);

}  // namespace slicesim
