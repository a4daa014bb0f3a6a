#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "slicesim/checkpoint.hpp"
#include "slicesim/config.hpp"
#include "slicesim/engine.hpp"
#include "slicesim/errors.hpp"
#include "slicesim/gradcheck.hpp"
#include "slicesim/metrics.hpp"
#include "slicesim/topology.hpp"

namespace fs = std::filesystem;

namespace slicesim::cli {

namespace {

constexpr const char* kUsage =
    "usage: slicesim <topology|run|compare|gradcheck> [options]  (--help for details)";

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("slicesim", sink);
  logger->set_pattern("[%l] %v");
  logger->set_level(spdlog::level::err);
  if (const char* level = std::getenv("SLICESIM_LOG")) {
    const std::string v(level);
    if (v == "info") logger->set_level(spdlog::level::info);
    if (v == "debug") logger->set_level(spdlog::level::debug);
  }
  return logger;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

SimConfig base_config(const std::string& path) {
  return path.empty() ? SimConfig{} : load_config(path);
}

void write_run_outputs(const RunReport& report, const fs::path& dir) {
  export_csv(report.series, dir);
  const PlacementDecision* last = report.last_decision ? &*report.last_decision : nullptr;
  export_dot(report.final_network, last, dir / "psn.dot");
  if (report.actor) save_checkpoint(dir / "actor.ckpt", *report.actor);
  if (report.critic) save_checkpoint(dir / "critic.ckpt", *report.critic);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Options {
  std::string config;
  std::string out = "psn.dot";
  std::string out_dir = ".";
  std::string algo;
  std::string algos = "random,p2c";
  std::string seeds = "1";
  std::optional<std::uint64_t> seed;
  std::optional<long long> arrivals;
  int jobs = 1;
  int gradcheck_configs = 100;
  std::uint64_t gradcheck_seed = 1;
};

int cmd_topology(const Options& o, std::ostream& out, spdlog::logger& log) {
  const SimConfig c = base_config(o.config);
  const PhysicalNetwork net = build_topology(c.topology);
  export_dot(net, nullptr, o.out);
  log.info("wrote {} ({} data centers, {} servers, {} links)", o.out, net.data_centers().size(),
           net.server_count(), net.links().size());
  out << "data_centers=" << net.data_centers().size() << " servers=" << net.server_count()
      << " links=" << net.links().size() << '\n';
  return kExitOk;
}

void apply_overrides(const Options& o, SimConfig& c) {
  if (o.seed) c.run.seed = *o.seed;
  if (o.arrivals) c.run.arrivals = *o.arrivals;
  c.validate();
}

int cmd_run(const Options& o, std::ostream& out, spdlog::logger& log) {
  SimConfig c = base_config(o.config);
  if (!o.algo.empty()) c.run.algorithm = parse_algorithm(o.algo);
  apply_overrides(o, c);
  const RunReport report = run(c);
  write_run_outputs(report, o.out_dir);
  log.info("{} seed {}: {} of {} accepted, median decision {:.3f} ms", algorithm_name(c.run.algorithm),
           c.run.seed, report.accepted, report.records.size(), report.latency.median_ms);
  out << "accepted/total=" << fixed6(report.cumulative_acceptance) << '\n';
  return kExitOk;
}

int cmd_compare(const Options& o, std::ostream& out, spdlog::logger& log) {
  SimConfig base = base_config(o.config);
  apply_overrides(o, base);
  const auto algos = split_list(o.algos);
  const auto seeds = split_list(o.seeds);
  if (algos.empty() || seeds.empty()) throw ConfigError("compare: need --algos and --seeds");

  std::vector<Algorithm> parsed;
  for (const auto& a : algos) parsed.push_back(parse_algorithm(a));
  std::vector<std::uint64_t> seed_values;
  for (const auto& s : seeds) {
    try {
      std::size_t used = 0;
      seed_values.push_back(std::stoull(s, &used));
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::logic_error&) {
      throw ConfigError("compare: bad seed '" + s + "'");
    }
  }

  fs::create_directories(o.out_dir);
  std::ofstream summary(fs::path(o.out_dir) / "summary.csv", std::ios::binary);
  if (!summary) throw IoError("cannot write summary.csv in " + o.out_dir);
  summary << "algo,seed,arrivals,cumulative_acceptance,mean_reward,wall_ms\n";

  std::map<std::size_t, std::vector<double>> by_algo;
  for (std::uint64_t seed : seed_values) {
    std::vector<SimConfig> configs;
    for (Algorithm a : parsed) {
      SimConfig c = base;
      c.run.seed = seed;
      c.run.algorithm = a;
      configs.push_back(c);
    }
    const ComparisonReport cmp = compare(configs, o.jobs);
    for (std::size_t i = 0; i < cmp.runs.size(); ++i) {
      const RunReport& r = cmp.runs[i];
      const std::string name(algorithm_name(parsed[i]));
      const fs::path dir = fs::path(o.out_dir) /
                           (std::to_string(i) + "_" + name + "_seed" + std::to_string(seed));
      write_run_outputs(r, dir);
      summary << name << ',' << seed << ',' << r.records.size() << ','
              << fixed6(r.cumulative_acceptance) << ',' << fixed6(r.mean_reward) << ','
              << fixed6(r.wall_ms) << '\n';
      by_algo[i].push_back(r.cumulative_acceptance);
      log.info("{} seed {}: acceptance {:.4f}", name, seed, r.cumulative_acceptance);
    }
  }

  std::ofstream aggregate(fs::path(o.out_dir) / "aggregate.csv", std::ios::binary);
  aggregate << "algo,runs,mean_cumulative_acceptance,stddev_cumulative_acceptance\n";
  out << "algo        runs  mean_acceptance  stddev\n";
  for (const auto& [i, values] : by_algo) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double sd = values.size() > 1 ? std::sqrt(var / static_cast<double>(values.size() - 1)) : 0.0;
    aggregate << algos[i] << ',' << values.size() << ',' << fixed6(mean) << ',' << fixed6(sd)
              << '\n';
    char line[128];
    std::snprintf(line, sizeof line, "%-10s  %4zu  %15.6f  %.6f\n", algos[i].c_str(),
                  values.size(), mean, sd);
    out << line;
  }
  return kExitOk;
}

int cmd_gradcheck(const Options& o, std::ostream& out) {
  const GradCheckSummary s = run_gradcheck_suite(o.gradcheck_configs, o.gradcheck_seed);
  out << "configurations=" << s.configurations << " max_relative_error=" << s.max_relative_error
      << '\n';
  return s.max_relative_error <= 1e-4 ? kExitOk : kExitRuntime;
}

}  // namespace

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto log = make_logger(err);
  Options o;

  CLI::App app{"Network slice placement simulator"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto* topology = app.add_subcommand("topology", "Build the substrate and export it as DOT");
  topology->add_option("--config", o.config, "TOML config file");
  topology->add_option("--out", o.out, "DOT output path");

  auto* run_cmd = app.add_subcommand("run", "Run one simulation");
  run_cmd->add_option("--config", o.config, "TOML config file");
  run_cmd->add_option("--algo", o.algo, "random|p2c|drl|edrl|hadrl|haedrl");
  run_cmd->add_option("--seed", o.seed, "Run seed");
  run_cmd->add_option("--arrivals", o.arrivals, "Number of slice requests");
  run_cmd->add_option("--out-dir", o.out_dir, "Directory for CSV, DOT, and checkpoints");

  auto* compare_cmd = app.add_subcommand("compare", "Run several algorithms on shared traffic");
  compare_cmd->add_option("--config", o.config, "TOML config file");
  compare_cmd->add_option("--algos", o.algos, "Comma-separated algorithms");
  compare_cmd->add_option("--seeds", o.seeds, "Comma-separated seeds");
  compare_cmd->add_option("--arrivals", o.arrivals, "Number of slice requests");
  compare_cmd->add_option("--jobs", o.jobs, "Parallel runs")->check(CLI::PositiveNumber);
  compare_cmd->add_option("--out-dir", o.out_dir, "Output directory");

  auto* gradcheck = app.add_subcommand("gradcheck", "Check backprop against finite differences");
  gradcheck->add_option("--configs", o.gradcheck_configs, "Random configurations")
      ->check(CLI::PositiveNumber);
  gradcheck->add_option("--seed", o.gradcheck_seed, "Seed for the random configurations");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "slicesim: error: " << e.what() << '\n' << kUsage << '\n';
    return kExitConfig;
  }

  try {
    if (topology->parsed()) return cmd_topology(o, out, *log);
    if (run_cmd->parsed()) return cmd_run(o, out, *log);
    if (compare_cmd->parsed()) return cmd_compare(o, out, *log);
    if (gradcheck->parsed()) return cmd_gradcheck(o, out);
  } catch (const ConfigError& e) {
    err << "slicesim: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "slicesim: error: " << e.what() << '\n';
    return kExitRuntime;
  }
  err << kUsage << '\n';
  return kExitConfig;
}

}  // namespace slicesim::cli
