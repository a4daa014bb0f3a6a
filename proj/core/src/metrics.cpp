#include "slicesim/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "slicesim/errors.hpp"

namespace slicesim {

MetricsSeries::MetricsSeries(int window) : window_(window) {
  if (window_ < 1) throw ConfigError("metrics: window must be >= 1");
}

void MetricsSeries::advance_clock(double t) {
  if (last_t_ && t < *last_t_) throw NonMonotoneTime(*last_t_, t);
  last_t_ = t;
}

void MetricsSeries::record_arrival(double t, bool accepted) {
  advance_clock(t);
  ++arrivals_;
  if (accepted) ++accepted_;
  recent_.push_back(accepted);
  if (accepted) ++recent_accepted_;
  if (recent_.size() > static_cast<std::size_t>(window_)) {
    if (recent_.front()) --recent_accepted_;
    recent_.pop_front();
  }
  acceptance_.push_back(AcceptanceRecord{
      t, arrivals_,
      static_cast<double>(recent_accepted_) / static_cast<double>(recent_.size()),
      static_cast<double>(accepted_) / static_cast<double>(arrivals_)});
}

void MetricsSeries::record_load(double t, double offered_load, const ResourceUtilization& util) {
  advance_clock(t);
  load_.push_back(LoadRecord{t, offered_load, util.cpu, util.ram, util.bw});
}

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path,
                                                const std::string& header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw IoError(path.string() + ": unexpected header");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

constexpr const char* kAcceptanceHeader = "t,arrival_idx,window_acceptance,cumulative_acceptance";
constexpr const char* kLoadHeader = "t,offered_load,cpu_util,ram_util,bw_util";

}  // namespace

void export_csv(const MetricsSeries& series, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  auto acc = open_for_write(dir / "acceptance.csv");
  acc << kAcceptanceHeader << '\n';
  for (const auto& r : series.acceptance()) {
    acc << fixed6(r.t) << ',' << r.arrival_idx << ',' << fixed6(r.window_acceptance) << ','
        << fixed6(r.cumulative_acceptance) << '\n';
  }
  auto load = open_for_write(dir / "load.csv");
  load << kLoadHeader << '\n';
  for (const auto& r : series.load()) {
    load << fixed6(r.t) << ',' << fixed6(r.offered_load) << ',' << fixed6(r.cpu_util) << ','
         << fixed6(r.ram_util) << ',' << fixed6(r.bw_util) << '\n';
  }
  if (!acc || !load) throw IoError("failed writing CSV files in " + dir.string());
}

ParsedSeries read_csv(const std::filesystem::path& dir) {
  ParsedSeries out;
  try {
    for (const auto& c : read_rows(dir / "acceptance.csv", kAcceptanceHeader)) {
      if (c.size() != 4) throw IoError("acceptance.csv: expected 4 columns");
      out.acceptance.push_back({std::stod(c[0]), std::stoll(c[1]), std::stod(c[2]),
                                std::stod(c[3])});
    }
    for (const auto& c : read_rows(dir / "load.csv", kLoadHeader)) {
      if (c.size() != 5) throw IoError("load.csv: expected 5 columns");
      out.load.push_back({std::stod(c[0]), std::stod(c[1]), std::stod(c[2]), std::stod(c[3]),
                          std::stod(c[4])});
    }
  } catch (const std::logic_error& e) {
    throw IoError(std::string("malformed CSV number: ") + e.what());
  }
  return out;
}

std::string to_dot(const PhysicalNetwork& net, const PlacementDecision* decision) {
  std::map<NodeId, std::vector<int>> vnfs_on;
  std::map<LinkId, std::vector<int>> vlinks_on;
  if (decision) {
    for (std::size_t i = 0; i < decision->vnf_hosts.size(); ++i) {
      vnfs_on[decision->vnf_hosts[i]].push_back(static_cast<int>(i));
    }
    for (std::size_t i = 0; i < decision->vlink_paths.size(); ++i) {
      for (LinkId l : decision->vlink_paths[i]) vlinks_on[l].push_back(static_cast<int>(i));
    }
  }
  auto join = [](const std::vector<int>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
    return s;
  };

  std::ostringstream out;
  out << "digraph psn {\n";
  out << "  node [shape=ellipse, fontsize=10];\n";
  out << "  edge [dir=none, fontsize=8];\n";

  auto write_server = [&](const ServerNode& s) {
    out << "    n" << s.server_id << " [label=\"s" << s.server_id << "\\ncpu=" << s.cpu_available
        << '/' << s.cpu_capacity << " ram=" << s.ram_available << '/' << s.ram_capacity;
    auto it = vnfs_on.find(s.server_id);
    if (it != vnfs_on.end()) out << "\\nvnf " << join(it->second) << "\", color=\"red\"";
    else out << '"';
    out << "];\n";
  };

  for (const auto& dc : net.data_centers()) {
    out << "  subgraph cluster_dc" << dc.dc_id << " {\n";
    out << "    label=\"dc" << dc.dc_id << ' ' << tier_name(dc.tier) << "\";\n";
    for (NodeId s : dc.server_ids) write_server(net.server(s));
    if (dc.switch_id >= 0) {
      out << "    n" << dc.switch_id << " [shape=box, label=\"sw" << dc.switch_id << "\"];\n";
    }
    out << "  }\n";
  }
  for (NodeId sw : net.switches()) {
    if (net.dc_of(sw) < 0) out << "  n" << sw << " [shape=box, label=\"sw" << sw << "\"];\n";
  }
  for (const auto& l : net.links()) {
    out << "  n" << l.a << " -> n" << l.b << " [label=\"bw=" << l.bw_available << '/'
        << l.bw_capacity;
    auto it = vlinks_on.find(l.link_id);
    if (it != vlinks_on.end()) out << " vlink " << join(it->second) << "\", color=\"red\"";
    else out << '"';
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

void export_dot(const PhysicalNetwork& net, const PlacementDecision* decision,
                const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  auto out = open_for_write(path);
  out << to_dot(net, decision);
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace slicesim
