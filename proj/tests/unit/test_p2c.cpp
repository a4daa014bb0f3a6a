#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "slicesim/p2c.hpp"
#include "slicesim/placement.hpp"
#include "slicesim/rng.hpp"
#include "slicesim/topology.hpp"

using namespace slicesim;

namespace {

PhysicalNetwork flat(int n, Units cpu, Units ram = 1000) {
  PhysicalNetwork net;
  net.add_data_center(Tier::Ccp);
  for (int i = 0; i < n; ++i) net.add_server(0, cpu, ram);
  const NodeId sw = net.add_switch(0);
  for (int i = 0; i < n; ++i) net.add_link(i, sw, 100);
  return net;
}

void load(PhysicalNetwork& net, SliceId id, NodeId host, Units cpu) {
  PlacementDecision d;
  d.slice_id = id;
  d.vnf_hosts = {host};
  d.vnf_demands = {{cpu, 0}};
  net.allocate(id, d);
}

struct Stats {
  double mean = 0, var = 0;
};

Stats stats(const std::vector<double>& xs) {
  Stats s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  for (double x : xs) s.var += (x - s.mean) * (x - s.mean);
  s.var /= (xs.size() - 1);
  return s;
}

}  // namespace

TEST_CASE("single feasible server is returned regardless of the stream") {
  PhysicalNetwork net = flat(5, 4);
  for (NodeId s : {0, 1, 3, 4}) load(net, s, s, 4);
  const PowerOfTwoChoices p2c(net);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng = make_stream(seed, kHeuristicStream);
    CHECK(p2c.select(net, 1, 1, std::nullopt, rng) == 2);
    CHECK(p2c.select(net, 1, 1, 0, rng) == 2);
  }
  Rng rng = make_stream(1, kHeuristicStream);
  CHECK_FALSE(p2c.select(net, 5, 1, std::nullopt, rng));
}

TEST_CASE("forced comparison picks the less loaded server") {
  PhysicalNetwork net = flat(2, 10);
  load(net, 1, 0, 8);  // 0.9 after placing 1
  load(net, 2, 1, 1);  // 0.2 after placing 1
  const PowerOfTwoChoices p2c(net);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng = make_stream(seed, kHeuristicStream);
    CHECK(p2c.select(net, 1, 1, std::nullopt, rng) == 1);
  }
  CHECK(less_loaded_after(net.server(1), net.server(0), 1));
  CHECK_FALSE(less_loaded_after(net.server(0), net.server(1), 1));

  // exact ties go to the lower id in either order
  PhysicalNetwork tie = flat(2, 10);
  CHECK(less_loaded_after(tie.server(0), tie.server(1), 3));
  CHECK_FALSE(less_loaded_after(tie.server(1), tie.server(0), 3));
  // 1/3 vs 2/6 is a tie only under exact arithmetic
  PhysicalNetwork mixed;
  mixed.add_data_center(Tier::Edc);
  mixed.add_server(0, 3, 1);
  mixed.add_server(0, 6, 1);
  load(mixed, 1, 1, 1);
  CHECK(less_loaded_after(mixed.server(0), mixed.server(1), 1));
  CHECK_FALSE(less_loaded_after(mixed.server(1), mixed.server(0), 1));
}

TEST_CASE("two idle servers among loaded ones are found at the two-choice rate") {
  PhysicalNetwork net = flat(1000, 100);
  for (NodeId s = 2; s < 1000; ++s) load(net, s, s, 99);
  const PowerOfTwoChoices p2c(net);
  Rng rng = make_stream(3, kHeuristicStream);
  const int trials = 10000;
  int low = 0;
  for (int t = 0; t < trials; ++t) {
    const auto pick = p2c.select(net, 1, 1, std::nullopt, rng);
    REQUIRE(pick);
    if (*pick < 2) ++low;
  }
  // a pair of distinct uniform draws contains an idle server with this probability
  const double p = 1.0 - (998.0 * 997.0) / (1000.0 * 999.0);
  const double sigma = std::sqrt(trials * p * (1 - p));
  CHECK(std::abs(low - trials * p) <= 3 * sigma);
}

TEST_CASE("max-load distribution matches a direct two-choice simulation") {
  const int servers = 50, balls = 500, reps = 200;
  std::vector<double> ours, reference;
  std::mt19937_64 oracle_rng(99);
  for (int r = 0; r < reps; ++r) {
    PhysicalNetwork net = flat(servers, 1000);
    const PowerOfTwoChoices p2c(net);
    Rng rng = make_stream(r, kHeuristicStream);
    for (int b = 0; b < balls; ++b) load(net, b, *p2c.select(net, 1, 0, std::nullopt, rng), 1);
    Units max_used = 0;
    for (const auto& s : net.servers()) max_used = std::max(max_used, s.cpu_capacity - s.cpu_available);
    ours.push_back(static_cast<double>(max_used));

    std::vector<int> bins(servers, 0);
    std::uniform_int_distribution<int> pick(0, servers - 1);
    for (int b = 0; b < balls; ++b) {
      const int i = pick(oracle_rng);
      int j = pick(oracle_rng);
      while (j == i) j = pick(oracle_rng);
      const int lo = std::min(i, j), hi = std::max(i, j);
      ++bins[bins[hi] < bins[lo] ? hi : lo];
    }
    reference.push_back(*std::max_element(bins.begin(), bins.end()));
  }
  const Stats a = stats(ours), b = stats(reference);
  CHECK(std::abs(a.mean - b.mean) <= 3 * std::sqrt(a.var / reps + b.var / reps));
}

TEST_CASE("two choices beat uniform random on maximum utilization") {
  const int reps = 10, slices = 5000;
  std::vector<double> p2c_max, rnd_max;
  for (int r = 0; r < reps; ++r) {
    PhysicalNetwork a = flat(100, 100);
    PhysicalNetwork b = a;
    const PowerOfTwoChoices p2c(a);
    Rng rng = make_stream(r, kHeuristicStream);
    Rng demand_rng = make_stream(r, kTrafficStream);
    for (int k = 0; k < slices; ++k) {
      const Units cpu = std::uniform_int_distribution<Units>(1, 2)(demand_rng);
      if (auto h = p2c.select(a, cpu, 0, std::nullopt, rng)) load(a, k, *h, cpu);
      const auto pool = candidate_nodes(b, cpu, 0);
      if (!pool.empty()) {
        load(b, k, pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)], cpu);
      }
    }
    auto max_util = [](const PhysicalNetwork& n) {
      double m = 0;
      for (const auto& s : n.servers()) m = std::max(m, 1.0 - double(s.cpu_available) / s.cpu_capacity);
      return m;
    };
    p2c_max.push_back(max_util(a));
    rnd_max.push_back(max_util(b));
  }
  const Stats a = stats(p2c_max), b = stats(rnd_max);
  CHECK(a.mean <= b.mean + 3 * std::sqrt(a.var / reps + b.var / reps));
}

TEST_CASE("proximity pruning keeps the nearest candidates") {
  TopologyConfig c;
  c.edc_count = 2;
  c.cdc_count = 1;
  c.ccp_count = 1;
  c.edc_servers = 4;
  c.cdc_servers = 4;
  c.ccp_servers = 8;
  const PhysicalNetwork net = build_topology(c);
  P2cConfig cfg;
  cfg.candidate_k = 4;
  const PowerOfTwoChoices p2c(net, cfg);
  CHECK(p2c.distances().between(0, 0) == 0);
  CHECK(p2c.distances().between(0, 1) == 2);
  CHECK(p2c.distances().between(0, 4) == 4);
  CHECK(p2c.distances().diameter() == 4);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng = make_stream(seed, kHeuristicStream);
    const auto pick = p2c.select(net, 1, 1, 1, rng);
    REQUIRE(pick);
    CHECK(*pick < 4);  // the four EDC-0 servers, including the previous host
    const auto other = p2c.select(net, 1, 1, 1, rng, true);
    REQUIRE(other);
    CHECK(*other != 1);
  }
}

TEST_CASE("scores are one-hot or zero and never point at an infeasible server") {
  TopologyConfig c;
  c.edc_count = 2;
  c.cdc_count = 1;
  c.ccp_count = 1;
  c.edc_servers = 3;
  c.cdc_servers = 3;
  c.ccp_servers = 3;
  c.edc_cpu = 4;
  c.cdc_cpu = 4;
  c.ccp_cpu = 4;
  PhysicalNetwork net = build_topology(c);
  const PowerOfTwoChoices p2c(net);
  std::mt19937_64 state_rng(5);
  Rng rng = make_stream(5, kHeuristicStream);
  int zero = 0, one = 0;
  for (int k = 0; k < 1000; ++k) {
    // random state: occasionally load or unload a server
    if (std::bernoulli_distribution(0.7)(state_rng) || net.allocations().empty()) {
      const NodeId h = std::uniform_int_distribution<NodeId>(0, 11)(state_rng);
      const Units cpu = std::uniform_int_distribution<Units>(1, 4)(state_rng);
      if (net.server(h).cpu_available >= cpu) load(net, 10000 + k, h, cpu);
    } else {
      net.release(net.allocations().begin()->first);
    }
    Nspr n;
    n.vnfs = {{std::uniform_int_distribution<Units>(1, 4)(state_rng), 1}};
    std::optional<NodeId> prev;
    if (std::bernoulli_distribution(0.5)(state_rng)) {
      prev = std::uniform_int_distribution<NodeId>(0, 11)(state_rng);
    }
    const auto h = p2c.scores(net, n, 0, prev, rng);
    REQUIRE(h.size() == 12);
    const double sum = std::accumulate(h.begin(), h.end(), 0.0);
    REQUIRE((sum == 0.0 || sum == 1.0));
    (sum == 0.0 ? zero : one)++;
    for (std::size_t s = 0; s < h.size(); ++s) {
      if (h[s] == 1.0) CHECK(net.server(static_cast<NodeId>(s)).cpu_available >= n.vnfs[0].cpu);
      CHECK((h[s] == 0.0 || h[s] == 1.0));
    }
  }
  CHECK(zero > 0);
  CHECK(one > 0);
}
