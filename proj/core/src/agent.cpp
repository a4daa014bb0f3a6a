#include "slicesim/agent.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "slicesim/errors.hpp"

namespace slicesim {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double clip_unit(double x) { return std::clamp(x, -1.0, 1.0); }

// Stable log-softmax over finite entries; masked (-inf) entries stay -inf.
Eigen::VectorXd log_softmax(const Eigen::VectorXd& z) {
  double peak = kNegInf;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (std::isfinite(z(i))) peak = std::max(peak, z(i));
  }
  if (!std::isfinite(peak)) throw NoFeasibleAction();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (std::isfinite(z(i))) sum += std::exp(z(i) - peak);
  }
  const double lse = peak + std::log(sum);
  Eigen::VectorXd out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    out(i) = std::isfinite(z(i)) ? z(i) - lse : kNegInf;
  }
  return out;
}

// Elementwise exp with masked entries mapped to exactly zero (Eigen's
// vectorized exp does not return 0 for -inf).
Eigen::VectorXd probabilities(const Eigen::VectorXd& logp) {
  Eigen::VectorXd p(logp.size());
  for (Eigen::Index i = 0; i < logp.size(); ++i) {
    p(i) = std::isfinite(logp(i)) ? std::exp(logp(i)) : 0.0;
  }
  return p;
}

Eigen::VectorXd shifted_logits(const Eigen::VectorXd& logits, std::span<const double> heuristic,
                               double beta) {
  Eigen::VectorXd z = logits;
  if (heuristic.empty() || beta == 0.0) return z;
  if (static_cast<Eigen::Index>(heuristic.size()) != logits.size()) {
    throw DimensionMismatch("heuristic scores", static_cast<std::size_t>(logits.size()),
                            heuristic.size());
  }
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (std::isfinite(z(i))) z(i) += beta * heuristic[static_cast<std::size_t>(i)];
  }
  return z;
}

Eigen::VectorXd masked_logits(const Eigen::VectorXd& raw, std::span<const std::uint8_t> mask) {
  Eigen::VectorXd z = raw;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (!mask[static_cast<std::size_t>(i)]) z(i) = kNegInf;
  }
  return z;
}

// Index of the heuristic's one-hot pick, or -1.
int heuristic_pick(std::span<const double> heuristic) {
  for (std::size_t i = 0; i < heuristic.size(); ++i) {
    if (heuristic[i] > 0.0) return static_cast<int>(i);
  }
  return -1;
}

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-2});
  return std::abs(analytic - numeric) / denom;
}

}  // namespace

AgentVariant AgentVariant::parse(std::string_view name) {
  if (name == "drl") return drl();
  if (name == "edrl") return edrl();
  if (name == "hadrl") return hadrl();
  if (name == "haedrl") return haedrl();
  throw ConfigError("unknown agent variant '" + std::string(name) + "'");
}

std::string_view AgentVariant::name() const {
  if (use_ha_control) return use_load_features ? "haedrl" : "hadrl";
  return use_load_features ? "edrl" : "drl";
}

void TrainingConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("agent: learning_rate must be > 0");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("agent: gamma must lie in [0, 1]");
  if (!(entropy_weight >= 0.0)) throw ConfigError("agent: entropy_weight must be >= 0");
  if (!(beta >= 0.0)) throw ConfigError("agent: beta must be >= 0");
  if (!(beta_decay > 0.0 && beta_decay <= 1.0)) {
    throw ConfigError("agent: beta_decay must lie in (0, 1]");
  }
  if (updates_per_episode < 1) throw ConfigError("agent: updates_per_episode must be >= 1");
  for (int h : hidden_sizes) {
    if (h < 1) throw ConfigError("agent: hidden layer sizes must be >= 1");
  }
  if (!(ha_loss_weight >= 0.0)) throw ConfigError("agent: ha_loss_weight must be >= 0");
}

std::size_t state_size(std::size_t server_count, AgentVariant variant) {
  return 3 * server_count + 5 + (variant.use_load_features ? 2 : 0);
}

Eigen::VectorXd featurize(const PhysicalNetwork& net, const Nspr& nspr, int vnf_index,
                          std::optional<NodeId> prev_host, const LoadEstimate& load,
                          AgentVariant variant) {
  if (vnf_index < 0 || vnf_index >= nspr.vnf_count()) {
    throw std::out_of_range("featurize: vnf_index out of range");
  }
  const std::size_t servers = net.server_count();
  Eigen::VectorXd x(static_cast<Eigen::Index>(state_size(servers, variant)));

  Units max_cpu = 0;
  Units max_ram = 0;
  for (const auto& s : net.servers()) {
    max_cpu = std::max(max_cpu, s.cpu_capacity);
    max_ram = std::max(max_ram, s.ram_capacity);
  }
  const Units max_bw = net.max_link_capacity();
  auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };

  Eigen::Index k = 0;
  for (const auto& s : net.servers()) {
    Units best_spare = 0;
    Units best_capacity = 0;
    for (const auto& adj : net.neighbors(s.server_id)) {
      const Link& l = net.link(adj.link);
      best_spare = std::max(best_spare, l.bw_available);
      best_capacity = std::max(best_capacity, l.bw_capacity);
    }
    x(k++) = ratio(static_cast<double>(s.cpu_available), static_cast<double>(s.cpu_capacity));
    x(k++) = ratio(static_cast<double>(s.ram_available), static_cast<double>(s.ram_capacity));
    x(k++) = ratio(static_cast<double>(best_spare), static_cast<double>(best_capacity));
  }

  const auto idx = static_cast<std::size_t>(vnf_index);
  const VnfDemand& d = nspr.vnfs[idx];
  // Bandwidth of the virtual link that reaches this VNF (the outgoing one for
  // the head of the chain).
  Units bw = 0;
  if (idx > 0) {
    bw = nspr.vlinks[idx - 1];
  } else if (!nspr.vlinks.empty()) {
    bw = nspr.vlinks.front();
  }
  x(k++) = clip_unit(ratio(static_cast<double>(d.cpu), static_cast<double>(max_cpu)));
  x(k++) = clip_unit(ratio(static_cast<double>(d.ram), static_cast<double>(max_ram)));
  x(k++) = clip_unit(ratio(static_cast<double>(bw), static_cast<double>(max_bw)));
  x(k++) = static_cast<double>(vnf_index) / static_cast<double>(nspr.vnf_count());
  if (prev_host) {
    x(k++) = servers > 1 ? static_cast<double>(*prev_host) / static_cast<double>(servers - 1)
                         : 0.0;
  } else {
    x(k++) = -1.0;
  }
  if (variant.use_load_features) {
    x(k++) = std::clamp(load.offered_load, 0.0, 2.0) / 2.0;
    x(k++) = std::clamp(load.cpu_utilization, 0.0, 1.0);
  }
  return x;
}

ActionMask feasibility_mask(const PhysicalNetwork& net, VnfDemand demand,
                            std::optional<NodeId> exclude) {
  ActionMask mask(net.server_count(), 0);
  for (const auto& s : net.servers()) {
    mask[static_cast<std::size_t>(s.server_id)] =
        s.cpu_available >= demand.cpu && s.ram_available >= demand.ram ? 1 : 0;
  }
  if (exclude && net.is_server(*exclude)) mask[static_cast<std::size_t>(*exclude)] = 0;
  return mask;
}

Eigen::VectorXd policy_forward(const Mlp& actor, const Eigen::VectorXd& state,
                               std::span<const std::uint8_t> mask) {
  if (state.size() != actor.input_size()) {
    throw DimensionMismatch("state", static_cast<std::size_t>(actor.input_size()),
                            static_cast<std::size_t>(state.size()));
  }
  if (mask.size() != static_cast<std::size_t>(actor.output_size())) {
    throw DimensionMismatch("mask", static_cast<std::size_t>(actor.output_size()), mask.size());
  }
  return masked_logits(actor.forward(state), mask);
}

Eigen::VectorXd ha_distribution(const Eigen::VectorXd& logits, std::span<const double> heuristic,
                                double beta) {
  if (beta < 0.0) throw std::invalid_argument("ha_distribution: beta must be >= 0");
  return probabilities(log_softmax(shifted_logits(logits, heuristic, beta)));
}

ActionSample select_action(const Eigen::VectorXd& probs, Rng& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double cumulative = 0.0;
  int last_positive = -1;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (!(probs(i) > 0.0)) continue;
    last_positive = static_cast<int>(i);
    cumulative += probs(i);
    if (u < cumulative) return {static_cast<int>(i), std::log(probs(i))};
  }
  if (last_positive < 0) throw NoFeasibleAction();
  return {last_positive, std::log(probs(last_positive))};
}

ActionSample greedy_action(const Eigen::VectorXd& probs) {
  int best = -1;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (probs(i) > 0.0 && (best < 0 || probs(i) > probs(best))) best = static_cast<int>(i);
  }
  if (best < 0) throw NoFeasibleAction();
  return {best, std::log(probs(best))};
}

double episode_reward(bool accepted, const DecisionCost& cost, const RewardConfig& config,
                      double bw_norm) {
  if (!accepted) return -1.0;
  const double bw_term =
      bw_norm > 0.0 ? static_cast<double>(cost.total_bw_consumed) / bw_norm : 0.0;
  return 1.0 + config.w_lb * (1.0 - cost.max_server_utilization_after) - config.w_bw * bw_term;
}

EpisodeGradients episode_gradients(const Mlp& actor, const Mlp& critic, const Trajectory& traj,
                                   const TrainingConfig& config) {
  const auto steps = static_cast<Eigen::Index>(traj.steps.size());
  if (steps == 0) throw std::invalid_argument("update: empty trajectory");
  if (!std::isfinite(traj.reward)) throw std::invalid_argument("update: non-finite reward");

  Eigen::MatrixXd states(actor.input_size(), steps);
  for (Eigen::Index t = 0; t < steps; ++t) {
    const auto& s = traj.steps[static_cast<std::size_t>(t)].state;
    if (s.size() != states.rows()) {
      throw DimensionMismatch("trajectory state", static_cast<std::size_t>(states.rows()),
                              static_cast<std::size_t>(s.size()));
    }
    states.col(t) = s;
  }

  Mlp::Tape actor_tape;
  Mlp::Tape critic_tape;
  const Eigen::MatrixXd logits = actor.forward(states, &actor_tape);
  const Eigen::MatrixXd values = critic.forward(states, &critic_tape);

  EpisodeGradients out;
  Eigen::MatrixXd d_logits = Eigen::MatrixXd::Zero(logits.rows(), steps);
  Eigen::MatrixXd d_values(1, steps);

  for (Eigen::Index t = 0; t < steps; ++t) {
    const TrajectoryStep& step = traj.steps[static_cast<std::size_t>(t)];
    const double ret = std::pow(config.gamma, static_cast<double>(steps - 1 - t)) * traj.reward;
    const double value = values(0, t);
    const double advantage = ret - value;

    const Eigen::VectorXd z =
        shifted_logits(masked_logits(logits.col(t), step.mask), step.heuristic, step.beta);
    const Eigen::VectorXd logp = log_softmax(z);
    const Eigen::VectorXd p = probabilities(logp);

    double entropy = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (p(i) > 0.0) entropy -= p(i) * logp(i);
    }

    out.loss.actor_loss += -advantage * logp(step.action) - config.entropy_weight * entropy;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(p.size());
    // -A * d log p_a / dz = -A * (e_a - p)
    g += advantage * p;
    g(step.action) -= advantage;
    if (config.entropy_weight != 0.0) {
      for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p(i) > 0.0) g(i) += config.entropy_weight * p(i) * (logp(i) + entropy);
      }
    }
    const int pick = config.ha_loss_weight > 0.0 ? heuristic_pick(step.heuristic) : -1;
    if (pick >= 0 && std::isfinite(logp(pick))) {
      out.loss.actor_loss += -config.ha_loss_weight * logp(pick);
      g += config.ha_loss_weight * p;
      g(pick) -= config.ha_loss_weight;
    }
    d_logits.col(t) = g;

    out.loss.critic_loss += advantage * advantage;
    d_values(0, t) = -2.0 * advantage;
  }

  out.actor = actor.backward(actor_tape, d_logits);
  out.critic = critic.backward(critic_tape, d_values);
  return out;
}

LossReport update(Mlp& actor, Mlp& critic, const Trajectory& traj, const TrainingConfig& config) {
  LossReport first;
  for (int k = 0; k < config.updates_per_episode; ++k) {
    EpisodeGradients g = episode_gradients(actor, critic, traj, config);
    if (!all_finite(g.actor) || !all_finite(g.critic)) throw NonFiniteGradient();
    if (k == 0) first = g.loss;
    actor.descend(g.actor, config.learning_rate);
    critic.descend(g.critic, config.learning_rate);
  }
  return first;
}

namespace {

template <class LossFn>
double compare_with_differences(Mlp net, const std::vector<double>& analytic, LossFn loss,
                                double epsilon) {
  std::vector<double> theta = net.flatten();
  double worst = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double saved = theta[k];
    theta[k] = saved + epsilon;
    net.assign(theta);
    const double up = loss(net);
    theta[k] = saved - epsilon;
    net.assign(theta);
    const double down = loss(net);
    theta[k] = saved;
    worst = std::max(worst, relative_error(analytic[k], (up - down) / (2.0 * epsilon)));
  }
  return worst;
}

}  // namespace

double grad_check(const Mlp& actor, const Eigen::VectorXd& state,
                  std::span<const std::uint8_t> mask, std::span<const double> heuristic,
                  double beta, int action, double advantage, double epsilon) {
  auto loss = [&](const Mlp& net) {
    const Eigen::VectorXd z = shifted_logits(policy_forward(net, state, mask), heuristic, beta);
    return -advantage * log_softmax(z)(action);
  };

  Mlp::Tape tape;
  const Eigen::MatrixXd logits = actor.forward(Eigen::MatrixXd(state), &tape);
  const Eigen::VectorXd p = probabilities(
      log_softmax(shifted_logits(masked_logits(logits.col(0), mask), heuristic, beta)));
  Eigen::MatrixXd d = advantage * p;
  d(action, 0) -= advantage;
  const std::vector<double> analytic = flatten(actor.backward(tape, d));
  return compare_with_differences(actor, analytic, loss, epsilon);
}

double grad_check_episode(const Mlp& actor, const Mlp& critic, const Trajectory& traj,
                          const TrainingConfig& config, double epsilon) {
  const EpisodeGradients g = episode_gradients(actor, critic, traj, config);
  // The critic is a fixed baseline inside the actor loss, and the critic loss
  // does not involve the actor, so each network is checked on its own loss.
  const double actor_err = compare_with_differences(
      actor, flatten(g.actor),
      [&](const Mlp& a) { return episode_gradients(a, critic, traj, config).loss.actor_loss; },
      epsilon);
  const double critic_err = compare_with_differences(
      critic, flatten(g.critic),
      [&](const Mlp& c) { return episode_gradients(actor, c, traj, config).loss.critic_loss; },
      epsilon);
  return std::max(actor_err, critic_err);
}

Agent::Agent(const PhysicalNetwork& net, AgentVariant variant, TrainingConfig training,
             RewardConfig reward, Rng& init_rng)
    : variant_(variant), training_(std::move(training)), reward_(reward) {
  training_.validate();
  std::vector<int> sizes{static_cast<int>(state_size(net.server_count(), variant_))};
  sizes.insert(sizes.end(), training_.hidden_sizes.begin(), training_.hidden_sizes.end());
  sizes.push_back(static_cast<int>(net.server_count()));
  actor_ = Mlp::glorot(sizes, init_rng, 0.01);
  sizes.back() = 1;
  critic_ = Mlp::glorot(sizes, init_rng, 1.0);
}

double Agent::current_beta() const {
  if (!variant_.use_ha_control) return 0.0;
  return training_.beta * std::pow(training_.beta_decay, static_cast<double>(episodes_));
}

std::uint64_t Agent::checksum() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const Mlp* net : {&actor_, &critic_}) {
    for (double v : net->flatten()) {
      const auto bits = std::bit_cast<std::uint64_t>(v);
      for (int b = 0; b < 8; ++b) {
        h ^= (bits >> (8 * b)) & 0xFFU;
        h *= 1099511628211ULL;
      }
    }
  }
  return h;
}

}  // namespace slicesim
