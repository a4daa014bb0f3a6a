#include "slicesim/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <queue>
#include <string>
#include <thread>
#include <variant>

#include "slicesim/errors.hpp"
#include "slicesim/rng.hpp"

namespace slicesim {

Algorithm parse_algorithm(std::string_view name) {
  if (name == "random") return Algorithm::Random;
  if (name == "p2c") return Algorithm::P2c;
  if (name == "drl") return Algorithm::Drl;
  if (name == "edrl") return Algorithm::Edrl;
  if (name == "hadrl") return Algorithm::HaDrl;
  if (name == "haedrl") return Algorithm::HaEdrl;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

std::string_view algorithm_name(Algorithm algo) {
  switch (algo) {
    case Algorithm::Random:
      return "random";
    case Algorithm::P2c:
      return "p2c";
    case Algorithm::Drl:
      return "drl";
    case Algorithm::Edrl:
      return "edrl";
    case Algorithm::HaDrl:
      return "hadrl";
    case Algorithm::HaEdrl:
      return "haedrl";
  }
  return "?";
}

std::optional<AgentVariant> agent_variant(Algorithm algo) {
  switch (algo) {
    case Algorithm::Drl:
      return AgentVariant::drl();
    case Algorithm::Edrl:
      return AgentVariant::edrl();
    case Algorithm::HaDrl:
      return AgentVariant::hadrl();
    case Algorithm::HaEdrl:
      return AgentVariant::haedrl();
    default:
      return std::nullopt;
  }
}

void SimConfig::validate() const {
  nspr.validate();
  load.validate();
  training.validate();
  if (p2c.candidate_k < 1) throw ConfigError("p2c: candidate_k must be >= 1");
  if (metrics.window < 1) throw ConfigError("metrics: window must be >= 1");
  if (metrics.sample_every < 1) throw ConfigError("metrics: sample_every must be >= 1");
  if (run.arrivals < 1) throw ConfigError("run: arrivals must be >= 1");
  for (const auto& p : run.phases) {
    if (p.arrivals < 1) throw ConfigError("run: phase arrival counts must be >= 1");
  }
  if (!(reward.w_lb >= 0.0) || !(reward.w_bw >= 0.0)) {
    throw ConfigError("reward: weights must be >= 0");
  }
}

bool same_outcome(const RunReport& a, const RunReport& b) {
  if (a.records.size() != b.records.size()) return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    ArrivalRecord x = a.records[i];
    x.algorithm = b.records[i].algorithm;
    if (!(x == b.records[i])) return false;
  }
  return a.seed == b.seed && a.arrivals == b.arrivals && a.accepted == b.accepted &&
         a.departures == b.departures && a.cumulative_acceptance == b.cumulative_acceptance &&
         a.mean_reward == b.mean_reward && a.phases == b.phases &&
         a.series.acceptance() == b.series.acceptance() && a.series.load() == b.series.load() &&
         a.final_network == b.final_network && a.last_decision == b.last_decision &&
         a.actor == b.actor && a.critic == b.critic;
}

namespace {

struct Event {
  double time = 0.0;
  std::uint64_t seq = 0;
  bool arrival = false;
  SliceId slice = 0;

  // Min-heap on (time, seq).
  bool operator>(const Event& o) const {
    return time != o.time ? time > o.time : seq > o.seq;
  }
};

void check_conservation(const PhysicalNetwork& net) {
  std::vector<Units> cpu(net.server_count(), 0);
  std::vector<Units> ram(net.server_count(), 0);
  std::vector<Units> bw(net.links().size(), 0);
  for (const auto& [id, alloc] : net.allocations()) {
    for (const auto& [s, d] : alloc.server_debits) {
      cpu[s] += d.cpu;
      ram[s] += d.ram;
    }
    for (const auto& [l, b] : alloc.link_debits) bw[l] += b;
  }
  for (const auto& s : net.servers()) {
    if (s.cpu_available + cpu[s.server_id] != s.cpu_capacity ||
        s.ram_available + ram[s.server_id] != s.ram_capacity || s.cpu_available < 0 ||
        s.ram_available < 0) {
      throw std::logic_error("conservation violated on server " + std::to_string(s.server_id));
    }
  }
  for (const auto& l : net.links()) {
    if (l.bw_available + bw[l.link_id] != l.bw_capacity || l.bw_available < 0) {
      throw std::logic_error("conservation violated on link " + std::to_string(l.link_id));
    }
  }
}

LatencyStats summarize(std::vector<double> ms) {
  LatencyStats out;
  if (ms.empty()) return out;
  std::sort(ms.begin(), ms.end());
  const std::size_t n = ms.size();
  out.median_ms = n % 2 ? ms[n / 2] : 0.5 * (ms[n / 2 - 1] + ms[n / 2]);
  out.p95_ms = ms[std::min(n - 1, static_cast<std::size_t>(std::ceil(0.95 * n)) - 1)];
  out.mean_ms = std::accumulate(ms.begin(), ms.end(), 0.0) / static_cast<double>(n);
  out.max_ms = ms.back();
  return out;
}

class PhaseTracker {
 public:
  explicit PhaseTracker(const std::vector<PhaseBlock>& blocks) : blocks_(blocks) {}

  // Mode of the arrival with 0-based index k (k non-decreasing across calls).
  PhaseMode mode_for(long long k) {
    if (blocks_.empty()) return PhaseMode::Train;
    while (block_ + 1 < blocks_.size() && k >= end_ + blocks_[block_].arrivals) {
      end_ += blocks_[block_].arrivals;
      ++block_;
    }
    return blocks_[block_].mode;
  }

 private:
  const std::vector<PhaseBlock>& blocks_;
  std::size_t block_ = 0;
  long long end_ = 0;
};

// Owns the state of one run and walks the event queue.
class Simulation {
 public:
  explicit Simulation(const SimConfig& config)
      : config_(config),
        net_(build_topology(config.topology)),
        p2c_(net_, config.p2c),
        traffic_rng_(make_stream(config.run.seed, kTrafficStream)),
        policy_rng_(make_stream(config.run.seed, kPolicyStream)),
        heuristic_rng_(make_stream(config.run.seed, kHeuristicStream)),
        phases_(config.run.phases) {
    report_.algorithm = config.run.algorithm;
    report_.seed = config.run.seed;
    report_.series = MetricsSeries(config.metrics.window);
    if (auto variant = agent_variant(config.run.algorithm)) {
      Rng init = make_stream(config.run.seed, kInitStream);
      agent_.emplace(net_, *variant, config.training, config.reward, init);
    }
    bw_norm_ = config.reward.bw_norm > 0.0
                   ? config.reward.bw_norm
                   : static_cast<double>(config.nspr.vnf_count) *
                         std::max(1, p2c_.distances().diameter());
  }

  RunReport execute() {
    const auto wall_start = std::chrono::steady_clock::now();
    schedule_next_arrival(0.0);
    while (!queue_.empty()) {
      const Event ev = queue_.top();
      queue_.pop();
      if (ev.arrival) {
        handle_arrival(ev);
        if (config_.run.check_conservation) check_conservation(net_);
        if (arrivals_seen_ >= config_.run.arrivals) break;
        schedule_next_arrival(ev.time);
      } else {
        net_.release(ev.slice);
        ++report_.departures;
        if (config_.run.check_conservation) check_conservation(net_);
      }
    }
    close_phase();

    const long long total = static_cast<long long>(report_.records.size());
    report_.cumulative_acceptance =
        total > 0 ? static_cast<double>(report_.accepted) / static_cast<double>(total) : 0.0;
    report_.mean_reward = total > 0 ? reward_sum_ / static_cast<double>(total) : 0.0;
    report_.final_network = net_;
    if (agent_) {
      report_.actor = agent_->actor();
      report_.critic = agent_->critic();
    }
    report_.latency = summarize(std::move(latencies_ms_));
    report_.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - wall_start)
                          .count();
    return std::move(report_);
  }

 private:
  void schedule_next_arrival(double now) {
    const double t = next_arrival(config_.load, now, traffic_rng_);
    if (!std::isfinite(t)) return;
    const auto slice = static_cast<SliceId>(report_.arrivals.size());
    report_.arrivals.push_back(sample_nspr(config_.nspr, slice, t, traffic_rng_));
    queue_.push(Event{t, seq_++, true, slice});
  }

  void close_phase() {
    if (!open_phase_) return;
    open_phase_->params_after = agent_ ? agent_->checksum() : 0;
    report_.phases.push_back(*open_phase_);
    open_phase_.reset();
  }

  void enter_phase(PhaseMode mode) {
    if (open_phase_ && open_phase_->mode == mode && !phase_boundary_pending_) return;
    close_phase();
    open_phase_ = PhaseSummary{mode, 0, 0, agent_ ? agent_->checksum() : 0, 0};
  }

  std::vector<NodeId> choose_hosts(const Nspr& nspr, PhaseMode mode, Trajectory* traj,
                                   std::optional<Rejection>& early_reject) {
    std::vector<NodeId> hosts;
    TentativeDebit tentative(net_);
    const bool colocate = config_.placement.allow_colocation;
    LoadEstimate load;
    if (agent_ && agent_->variant().use_load_features) {
      load.offered_load = offered_load(config_.load, config_.nspr, net_, nspr.arrival_time);
      load.cpu_utilization = utilization(net_).overall.cpu;
    }
    const double beta = agent_ ? agent_->current_beta() : 0.0;

    std::optional<NodeId> prev;
    for (int i = 0; i < nspr.vnf_count(); ++i) {
      const VnfDemand demand = nspr.vnfs[static_cast<std::size_t>(i)];
      std::optional<NodeId> pick;
      switch (config_.run.algorithm) {
        case Algorithm::Random: {
          auto pool = candidate_nodes(net_, demand.cpu, demand.ram);
          if (!colocate && prev) std::erase(pool, *prev);
          if (!pool.empty()) {
            std::uniform_int_distribution<std::size_t> u(0, pool.size() - 1);
            pick = pool[u(policy_rng_)];
          }
          break;
        }
        case Algorithm::P2c:
          pick = p2c_.select(net_, demand.cpu, demand.ram, prev, policy_rng_, !colocate);
          break;
        default:
          pick = agent_step(nspr, i, prev, demand, load, beta, mode, traj);
          break;
      }
      if (!pick) {
        early_reject = Rejection{Rejection::Reason::NodeCapacity, i};
        break;
      }
      hosts.push_back(*pick);
      tentative.debit(*pick, demand);
      prev = pick;
    }
    return hosts;
  }

  std::optional<NodeId> agent_step(const Nspr& nspr, int i, std::optional<NodeId> prev,
                                   VnfDemand demand, const LoadEstimate& load, double beta,
                                   PhaseMode mode, Trajectory* traj) {
    const bool colocate = config_.placement.allow_colocation;
    ActionMask mask = feasibility_mask(net_, demand, colocate ? std::nullopt : prev);
    if (std::find(mask.begin(), mask.end(), 1) == mask.end()) return std::nullopt;

    Eigen::VectorXd state = featurize(net_, nspr, i, prev, load, agent_->variant());
    const Eigen::VectorXd logits = policy_forward(agent_->actor(), state, mask);
    std::vector<double> heuristic;
    if (agent_->variant().use_ha_control) {
      heuristic = p2c_.scores(net_, nspr, i, prev, heuristic_rng_);
    }
    const Eigen::VectorXd probs = ha_distribution(logits, heuristic, beta);
    const ActionSample action =
        mode == PhaseMode::Train ? select_action(probs, policy_rng_) : greedy_action(probs);

    if (traj) {
      TrajectoryStep step;
      step.value = agent_->critic().forward(state)(0);
      step.state = std::move(state);
      step.mask = std::move(mask);
      step.action = action.index;
      step.log_prob = action.log_prob;
      step.heuristic = std::move(heuristic);
      step.beta = beta;
      traj->steps.push_back(std::move(step));
    }
    return static_cast<NodeId>(action.index);
  }

  void handle_arrival(const Event& ev) {
    const auto decision_start = std::chrono::steady_clock::now();
    const long long index = arrivals_seen_++;
    const PhaseMode mode = phases_.mode_for(index);
    phase_boundary_pending_ = is_block_start(index);
    enter_phase(mode);
    phase_boundary_pending_ = false;

    Nspr& nspr = report_.arrivals[static_cast<std::size_t>(ev.slice)];
    ArrivalRecord rec;
    rec.slice_id = nspr.slice_id;
    rec.time = ev.time;
    rec.algorithm = config_.run.algorithm;
    rec.mode = mode;

    const bool learning = agent_ && mode == PhaseMode::Train;
    Trajectory traj;
    std::optional<Rejection> rejection;
    rec.hosts = choose_hosts(nspr, mode, learning ? &traj : nullptr, rejection);

    DecisionCost cost;
    if (!rejection) {
      PlacementResult result = assemble_decision(net_, nspr, rec.hosts, config_.placement);
      if (auto* decision = std::get_if<PlacementDecision>(&result)) {
        cost = decision_cost(net_, *decision);
        net_.allocate(nspr.slice_id, *decision);
        report_.last_decision = std::move(*decision);
        rec.accepted = true;
      } else {
        rejection = std::get<Rejection>(result);
      }
    }
    rec.rejection = rejection;
    rec.reward = episode_reward(rec.accepted, cost, config_.reward, bw_norm_);
    if (learning && !traj.steps.empty()) {
      traj.reward = rec.reward;
      try {
        update(agent_->actor(), agent_->critic(), traj, config_.training);
      } catch (const NonFiniteGradient&) {
        ++skipped_updates_;
      }
    }
    if (learning) agent_->finish_episode();
    latencies_ms_.push_back(std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - decision_start)
                                .count());

    if (rec.accepted) {
      nspr.status = NsprStatus::Placed;
      queue_.push(Event{ev.time + nspr.holding_time, seq_++, false, nspr.slice_id});
      ++report_.accepted;
      ++open_phase_->accepted;
    } else {
      nspr.status = NsprStatus::Rejected;
    }
    ++open_phase_->arrivals;
    reward_sum_ += rec.reward;

    report_.series.record_arrival(ev.time, rec.accepted);
    if (index % config_.metrics.sample_every == 0) {
      report_.series.record_load(
          ev.time, offered_load(config_.load, config_.nspr, net_, ev.time),
          utilization(net_).overall);
    }
    report_.records.push_back(std::move(rec));
  }

  bool is_block_start(long long index) const {
    long long start = 0;
    for (const auto& b : config_.run.phases) {
      if (index == start) return true;
      start += b.arrivals;
    }
    return false;
  }

  const SimConfig& config_;
  PhysicalNetwork net_;
  PowerOfTwoChoices p2c_;
  Rng traffic_rng_;
  Rng policy_rng_;
  Rng heuristic_rng_;
  PhaseTracker phases_;
  std::optional<Agent> agent_;
  double bw_norm_ = 1.0;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
  long long arrivals_seen_ = 0;
  double reward_sum_ = 0.0;
  long long skipped_updates_ = 0;
  std::optional<PhaseSummary> open_phase_;
  bool phase_boundary_pending_ = false;
  std::vector<double> latencies_ms_;
  RunReport report_;
};

}  // namespace

RunReport run(const SimConfig& config) {
  config.validate();
  Simulation sim(config);
  return sim.execute();
}

ComparisonReport compare(const std::vector<SimConfig>& configs, int jobs) {
  if (configs.empty()) throw ConfigError("compare: no configurations");
  const SimConfig& ref = configs.front();
  for (const auto& c : configs) {
    if (!(c.topology == ref.topology)) throw ConfigError("compare: topology differs");
    if (!(c.load == ref.load) || !(c.nspr == ref.nspr)) {
      throw ConfigError("compare: traffic parameters differ");
    }
    if (c.run.seed != ref.run.seed) throw ConfigError("compare: seeds differ");
    if (c.run.arrivals != ref.run.arrivals) throw ConfigError("compare: arrival counts differ");
    c.validate();
  }

  ComparisonReport out;
  out.runs.resize(configs.size());
  const auto n = configs.size();
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) out.runs[i] = run(configs[i]);
    return out;
  }

  std::mutex guard;
  std::size_t next = 0;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      std::size_t i = 0;
      {
        std::lock_guard lock(guard);
        if (next >= n || failure) return;
        i = next++;
      }
      try {
        RunReport r = run(configs[i]);
        out.runs[i] = std::move(r);
      } catch (...) {
        std::lock_guard lock(guard);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace slicesim
