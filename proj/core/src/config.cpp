#include "slicesim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "slicesim/errors.hpp"

namespace slicesim {

namespace {

class Section {
 public:
  Section(const toml::table* table, std::string name) : table_(table), name_(std::move(name)) {}

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!table_) return;
    const toml::node* node = table_->get(key);
    if (!node) return;
    if constexpr (std::is_same_v<T, bool>) {
      auto v = node->value_exact<bool>();
      if (!v) fail(key, "a boolean");
      out = *v;
    } else if constexpr (std::is_integral_v<T>) {
      auto v = node->value_exact<std::int64_t>();
      if (!v) fail(key, "an integer");
      out = static_cast<T>(*v);
    } else if constexpr (std::is_floating_point_v<T>) {
      if (auto i = node->value_exact<std::int64_t>()) {
        out = static_cast<T>(*i);
      } else if (auto d = node->value_exact<double>()) {
        out = *d;
      } else {
        fail(key, "a number");
      }
    } else if constexpr (std::is_same_v<T, std::string>) {
      auto v = node->value_exact<std::string>();
      if (!v) fail(key, "a string");
      out = *v;
    }
  }

  const toml::array* array(const char* key) {
    seen_.insert(key);
    if (!table_) return nullptr;
    const toml::node* node = table_->get(key);
    if (!node) return nullptr;
    if (!node->is_array()) fail(key, "an array");
    return node->as_array();
  }

  bool has(const char* key) const { return table_ && table_->contains(key); }

  // Rejects keys nobody asked for.
  void finish() const {
    if (!table_) return;
    for (const auto& [k, v] : *table_) {
      if (!seen_.contains(std::string(k.str()))) {
        throw ConfigError("[" + name_ + "] unknown key '" + std::string(k.str()) + "'");
      }
    }
  }

  [[noreturn]] void fail(const char* key, const char* expected) const {
    throw ConfigError("[" + name_ + "] " + key + " must be " + expected);
  }

 private:
  const toml::table* table_;
  std::string name_;
  std::set<std::string> seen_;
};

double number_of(const toml::node& n, const std::string& where) {
  if (auto i = n.value_exact<std::int64_t>()) return static_cast<double>(*i);
  if (auto d = n.value_exact<double>()) return *d;
  throw ConfigError(where + " must be numeric");
}

void read_topology(Section s, TopologyConfig& c) {
  s.read("edc_count", c.edc_count);
  s.read("cdc_count", c.cdc_count);
  s.read("ccp_count", c.ccp_count);
  s.read("edc_servers", c.edc_servers);
  s.read("cdc_servers", c.cdc_servers);
  s.read("ccp_servers", c.ccp_servers);
  s.read("edc_cpu", c.edc_cpu);
  s.read("edc_ram", c.edc_ram);
  s.read("cdc_cpu", c.cdc_cpu);
  s.read("cdc_ram", c.cdc_ram);
  s.read("ccp_cpu", c.ccp_cpu);
  s.read("ccp_ram", c.ccp_ram);
  s.read("bw_server_switch", c.bw_server_switch);
  s.read("bw_edc_cdc", c.bw_edc_cdc);
  s.read("bw_cdc_ring", c.bw_cdc_ring);
  s.read("bw_cdc_ccp", c.bw_cdc_ccp);
  s.finish();
}

void read_traffic(Section s, LoadModel& load, NsprTemplate& tmpl) {
  s.read("lambda_base", load.lambda_base);
  s.read("amplitude", load.amplitude);
  s.read("period", load.period);
  if (const toml::array* phases = s.array("phases")) {
    load.phases.clear();
    for (const auto& item : *phases) {
      const toml::array* pair = item.as_array();
      if (!pair || pair->size() != 2) {
        throw ConfigError("[traffic] phases entries must be [start, multiplier]");
      }
      load.phases.push_back(LoadPhase{number_of(*pair->get(0), "[traffic] phase start"),
                                      number_of(*pair->get(1), "[traffic] phase multiplier")});
    }
  }
  s.read("vnf_count", tmpl.vnf_count);
  s.read("cpu_min", tmpl.cpu.min);
  s.read("cpu_max", tmpl.cpu.max);
  s.read("ram_min", tmpl.ram.min);
  s.read("ram_max", tmpl.ram.max);
  s.read("bw_min", tmpl.bw.min);
  s.read("bw_max", tmpl.bw.max);
  s.read("mean_holding", tmpl.mean_holding);
  s.finish();
}

void read_agent(Section s, TrainingConfig& t, std::optional<Algorithm>& variant) {
  std::string name;
  if (s.has("variant")) {
    s.read("variant", name);
    variant = parse_algorithm(name);
    if (!agent_variant(*variant)) throw ConfigError("[agent] variant must name an agent");
  } else {
    s.read("variant", name);
  }
  s.read("learning_rate", t.learning_rate);
  s.read("gamma", t.gamma);
  s.read("entropy_weight", t.entropy_weight);
  s.read("beta", t.beta);
  s.read("beta_decay", t.beta_decay);
  s.read("updates_per_episode", t.updates_per_episode);
  s.read("ha_loss_weight", t.ha_loss_weight);
  if (const toml::array* hidden = s.array("hidden")) {
    t.hidden_sizes.clear();
    for (const auto& item : *hidden) {
      auto v = item.value_exact<std::int64_t>();
      if (!v) throw ConfigError("[agent] hidden must list integers");
      t.hidden_sizes.push_back(static_cast<int>(*v));
    }
  }
  s.finish();
}

void read_run(Section s, RunConfig& r, bool& algorithm_given) {
  s.read("arrivals", r.arrivals);
  std::int64_t seed = static_cast<std::int64_t>(r.seed);
  s.read("seed", seed);
  if (seed < 0) throw ConfigError("[run] seed must be >= 0");
  r.seed = static_cast<std::uint64_t>(seed);
  algorithm_given = s.has("algorithm");
  std::string algo(algorithm_name(r.algorithm));
  s.read("algorithm", algo);
  r.algorithm = parse_algorithm(algo);
  s.read("check_conservation", r.check_conservation);
  if (const toml::array* phases = s.array("phases")) {
    r.phases.clear();
    for (const auto& item : *phases) {
      const toml::array* pair = item.as_array();
      if (!pair || pair->size() != 2) {
        throw ConfigError("[run] phases entries must be [count, \"train\"|\"eval\"]");
      }
      auto count = pair->get(0)->value_exact<std::int64_t>();
      auto mode = pair->get(1)->value_exact<std::string>();
      if (!count || !mode || (*mode != "train" && *mode != "eval")) {
        throw ConfigError("[run] phases entries must be [count, \"train\"|\"eval\"]");
      }
      r.phases.push_back({*count, *mode == "train" ? PhaseMode::Train : PhaseMode::Eval});
    }
  }
  s.finish();
}

}  // namespace

SimConfig parse_config(std::string_view toml_text, std::string_view source) {
  toml::table root;
  try {
    root = toml::parse(toml_text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source << ':' << e.source().begin.line << ": " << e.description();
    throw ConfigError(msg.str());
  }

  static const std::set<std::string> known{"topology", "traffic", "placement", "p2c",
                                           "agent",    "reward",  "metrics",   "run"};
  for (const auto& [k, v] : root) {
    if (!known.contains(std::string(k.str())) || !v.is_table()) {
      throw ConfigError("unknown config section '" + std::string(k.str()) + "'");
    }
  }
  auto section = [&](const char* name) { return Section(root[name].as_table(), name); };

  SimConfig c;
  read_topology(section("topology"), c.topology);
  read_traffic(section("traffic"), c.load, c.nspr);
  {
    Section s = section("placement");
    s.read("allow_colocation", c.placement.allow_colocation);
    s.finish();
  }
  {
    Section s = section("p2c");
    s.read("candidate_k", c.p2c.candidate_k);
    s.finish();
  }
  std::optional<Algorithm> agent_algo;
  read_agent(section("agent"), c.training, agent_algo);
  {
    Section s = section("reward");
    s.read("w_lb", c.reward.w_lb);
    s.read("w_bw", c.reward.w_bw);
    s.read("bw_norm", c.reward.bw_norm);
    s.finish();
  }
  {
    Section s = section("metrics");
    s.read("window", c.metrics.window);
    s.read("sample_every", c.metrics.sample_every);
    s.finish();
  }
  bool algorithm_given = false;
  read_run(section("run"), c.run, algorithm_given);
  if (!algorithm_given && agent_algo) c.run.algorithm = *agent_algo;

  c.validate();
  return c;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

}  // namespace slicesim
