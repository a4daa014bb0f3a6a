#pragma once

#include <deque>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "slicesim/decision.hpp"
#include "slicesim/substrate.hpp"

namespace slicesim {

struct AcceptanceRecord {
  double t = 0.0;
  long long arrival_idx = 0;  // 1-based
  double window_acceptance = 0.0;
  double cumulative_acceptance = 0.0;

  friend bool operator==(const AcceptanceRecord&, const AcceptanceRecord&) = default;
};

struct LoadRecord {
  double t = 0.0;
  double offered_load = 0.0;
  double cpu_util = 0.0;
  double ram_util = 0.0;
  double bw_util = 0.0;

  friend bool operator==(const LoadRecord&, const LoadRecord&) = default;
};

// Acceptance-ratio and network-load time series for one run.
class MetricsSeries {
 public:
  explicit MetricsSeries(int window = 100);

  // Throws NonMonotoneTime if t precedes the previous record of either kind.
  void record_arrival(double t, bool accepted);
  void record_load(double t, double offered_load, const ResourceUtilization& util);

  const std::vector<AcceptanceRecord>& acceptance() const { return acceptance_; }
  const std::vector<LoadRecord>& load() const { return load_; }
  int window() const { return window_; }
  long long accepted() const { return accepted_; }
  long long arrivals() const { return arrivals_; }

 private:
  void advance_clock(double t);

  int window_;
  std::deque<bool> recent_;
  long long recent_accepted_ = 0;
  long long accepted_ = 0;
  long long arrivals_ = 0;
  std::optional<double> last_t_;
  std::vector<AcceptanceRecord> acceptance_;
  std::vector<LoadRecord> load_;
};

// Writes acceptance.csv and load.csv into `dir` (created if missing).
void export_csv(const MetricsSeries& series, const std::filesystem::path& dir);

struct ParsedSeries {
  std::vector<AcceptanceRecord> acceptance;
  std::vector<LoadRecord> load;
};

// Reads back the two files written by export_csv().
ParsedSeries read_csv(const std::filesystem::path& dir);

// Graphviz view of the substrate: one cluster per data center, servers with
// their spare/total CPU and RAM, links with spare/total bandwidth. Hosts and
// path links of `decision` are drawn red.
std::string to_dot(const PhysicalNetwork& net, const PlacementDecision* decision = nullptr);
void export_dot(const PhysicalNetwork& net, const PlacementDecision* decision,
                const std::filesystem::path& path);

}  // namespace slicesim
