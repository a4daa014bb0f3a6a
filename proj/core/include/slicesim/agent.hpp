#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "slicesim/mlp.hpp"
#include "slicesim/placement.hpp"
#include "slicesim/rng.hpp"
#include "slicesim/substrate.hpp"
#include "slicesim/traffic.hpp"

namespace slicesim {

// The four actor-critic placement agents differ along two axes: whether the
// state carries network-load features and whether the heuristic biases the
// action distribution.
struct AgentVariant {
  bool use_load_features = false;
  bool use_ha_control = false;

  static AgentVariant drl() { return {false, false}; }
  static AgentVariant edrl() { return {true, false}; }
  static AgentVariant hadrl() { return {false, true}; }
  static AgentVariant haedrl() { return {true, true}; }

  // "drl" | "edrl" | "hadrl" | "haedrl"; throws ConfigError otherwise.
  static AgentVariant parse(std::string_view name);
  std::string_view name() const;

  friend bool operator==(const AgentVariant&, const AgentVariant&) = default;
};

struct TrainingConfig {
  double learning_rate = 1e-3;
  double gamma = 0.99;
  double entropy_weight = 0.01;
  double beta = 5.0;
  double beta_decay = 1.0;
  int updates_per_episode = 1;
  std::vector<int> hidden_sizes{128, 64};
  // Optional cross-entropy pull toward the heuristic's pick.
  double ha_loss_weight = 0.0;

  void validate() const;
  friend bool operator==(const TrainingConfig&, const TrainingConfig&) = default;
};

struct RewardConfig {
  double w_lb = 0.5;
  double w_bw = 0.25;
  // <= 0 means derive it as vnf_count * server hop diameter.
  double bw_norm = 0.0;

  friend bool operator==(const RewardConfig&, const RewardConfig&) = default;
};

struct LoadEstimate {
  double offered_load = 0.0;
  double cpu_utilization = 0.0;
};

std::size_t state_size(std::size_t server_count, AgentVariant variant);

// Per server: spare/total cpu, spare/total ram, and the best spare bandwidth
// on an attached link over the best attached capacity. Then the request: demands, position in the chain, and the
// previous host. Load features are appended for the e-variants.
Eigen::VectorXd featurize(const PhysicalNetwork& net, const Nspr& nspr, int vnf_index,
                          std::optional<NodeId> prev_host, const LoadEstimate& load,
                          AgentVariant variant);

using ActionMask = std::vector<std::uint8_t>;

// Servers that can host the VNF, optionally excluding the previous host.
ActionMask feasibility_mask(const PhysicalNetwork& net, VnfDemand demand,
                            std::optional<NodeId> exclude = std::nullopt);

// Actor forward pass; masked-out actions get -infinity.
Eigen::VectorXd policy_forward(const Mlp& actor, const Eigen::VectorXd& state,
                               std::span<const std::uint8_t> mask);

// softmax(logits + beta * heuristic) over the finite entries. Throws
// NoFeasibleAction if every entry is masked.
Eigen::VectorXd ha_distribution(const Eigen::VectorXd& logits, std::span<const double> heuristic,
                                double beta);

struct ActionSample {
  int index = 0;
  double log_prob = 0.0;
};

ActionSample select_action(const Eigen::VectorXd& probs, Rng& rng);
// Highest-probability action, lowest index on ties.
ActionSample greedy_action(const Eigen::VectorXd& probs);

double episode_reward(bool accepted, const DecisionCost& cost, const RewardConfig& config,
                      double bw_norm);

struct TrajectoryStep {
  Eigen::VectorXd state;
  ActionMask mask;
  int action = 0;
  double log_prob = 0.0;
  std::vector<double> heuristic;  // empty when the variant has no heuristic
  double beta = 0.0;
  double value = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  double reward = 0.0;
};

struct LossReport {
  double actor_loss = 0.0;
  double critic_loss = 0.0;
};

struct EpisodeGradients {
  LossReport loss;
  MlpGradient actor;
  MlpGradient critic;
};

// Losses of one episode and their exact parameter gradients.
EpisodeGradients episode_gradients(const Mlp& actor, const Mlp& critic, const Trajectory& traj,
                                   const TrainingConfig& config);

// updates_per_episode plain gradient steps on both networks. Throws
// NonFiniteGradient (leaving both untouched by that step) on NaN/inf.
LossReport update(Mlp& actor, Mlp& critic, const Trajectory& traj, const TrainingConfig& config);

// Largest |analytic - numeric| / max(|analytic|, |numeric|, 1e-2) between the
// backprop gradient of -advantage * log pi(action) and central differences.
double grad_check(const Mlp& actor, const Eigen::VectorXd& state,
                  std::span<const std::uint8_t> mask, std::span<const double> heuristic,
                  double beta, int action, double advantage, double epsilon = 1e-5);

// Same comparison for the full episode loss (actor + critic) of a trajectory.
double grad_check_episode(const Mlp& actor, const Mlp& critic, const Trajectory& traj,
                          const TrainingConfig& config, double epsilon = 1e-5);

// Actor, critic, and the bookkeeping that drives the heuristic's decay.
class Agent {
 public:
  Agent(const PhysicalNetwork& net, AgentVariant variant, TrainingConfig training,
        RewardConfig reward, Rng& init_rng);

  AgentVariant variant() const { return variant_; }
  const TrainingConfig& training() const { return training_; }
  const RewardConfig& reward() const { return reward_; }

  Mlp& actor() { return actor_; }
  const Mlp& actor() const { return actor_; }
  Mlp& critic() { return critic_; }
  const Mlp& critic() const { return critic_; }

  // Heuristic weight for the current episode; zero without HA control.
  double current_beta() const;
  long long episodes() const { return episodes_; }
  void finish_episode() { ++episodes_; }

  // FNV-1a over the raw parameter bytes.
  std::uint64_t checksum() const;

 private:
  AgentVariant variant_;
  TrainingConfig training_;
  RewardConfig reward_;
  Mlp actor_;
  Mlp critic_;
  long long episodes_ = 0;
};

}  // namespace slicesim
