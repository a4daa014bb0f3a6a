#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "slicesim/agent.hpp"
#include "slicesim/checkpoint.hpp"
#include "slicesim/errors.hpp"
#include "slicesim/gradcheck.hpp"
#include "slicesim/placement.hpp"
#include "slicesim/rng.hpp"
#include "slicesim/topology.hpp"
#include "slicesim/traffic.hpp"

using namespace slicesim;
namespace fs = std::filesystem;

namespace {

PhysicalNetwork desk() {
  TopologyConfig c;
  c.edc_count = 4;
  c.cdc_count = 2;
  c.ccp_count = 1;
  c.edc_servers = 10;
  c.cdc_servers = 20;
  c.ccp_servers = 20;
  return build_topology(c);
}

Nspr request() {
  Nspr n;
  n.slice_id = 3;
  n.vnfs = {{2, 3}, {4, 1}, {1, 1}};
  n.vlinks = {2, 3};
  return n;
}

// Plain-loop forward pass, independent of the Eigen implementation.
std::vector<double> reference_forward(const Mlp& net, std::vector<double> x) {
  const auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& w = layers[l].weight;
    std::vector<double> y(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      long double acc = layers[l].bias(i);
      for (Eigen::Index j = 0; j < w.cols(); ++j) acc += static_cast<long double>(w(i, j)) * x[j];
      y[i] = static_cast<double>(acc);
      if (l + 1 < layers.size()) y[i] = std::tanh(y[i]);
    }
    x = std::move(y);
  }
  return x;
}

std::vector<double> reference_softmax(const std::vector<double>& z) {
  double peak = -INFINITY;
  for (double v : z) peak = std::max(peak, v);
  std::vector<double> p(z.size(), 0.0);
  double sum = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (std::isfinite(z[i])) sum += (p[i] = std::exp(z[i] - peak));
  }
  for (double& v : p) v /= sum;
  return p;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "slicesim_test_agent";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("variants map one-to-one onto names") {
  for (auto name : {"drl", "edrl", "hadrl", "haedrl"}) {
    CHECK(AgentVariant::parse(name).name() == name);
  }
  CHECK(AgentVariant::parse("edrl") == AgentVariant{true, false});
  CHECK(AgentVariant::parse("hadrl") == AgentVariant{false, true});
  CHECK_THROWS_AS(AgentVariant::parse("ppo"), ConfigError);
}

TEST_CASE("featurize layout and ranges") {
  PhysicalNetwork net = desk();
  const Nspr n = request();
  const Eigen::VectorXd fresh = featurize(net, n, 0, std::nullopt, {}, AgentVariant::drl());
  REQUIRE(fresh.size() == 3 * 100 + 5);
  for (Eigen::Index i = 0; i < 300; ++i) CHECK(fresh(i) == 1.0);
  CHECK(fresh(300) == doctest::Approx(2.0 / 32.0));
  CHECK(fresh(301) == doctest::Approx(3.0 / 64.0));
  CHECK(fresh(302) == doctest::Approx(2.0 / 400.0));
  CHECK(fresh(303) == 0.0);
  CHECK(fresh(304) == -1.0);

  const Eigen::VectorXd mid = featurize(net, n, 2, 99, {}, AgentVariant::hadrl());
  CHECK(mid(302) == doctest::Approx(3.0 / 400.0));
  CHECK(mid(303) == doctest::Approx(2.0 / 3.0));
  CHECK(mid(304) == 1.0);

  // load some servers and check the recomputed load features
  Rng rng = make_stream(1, kTrafficStream);
  NsprTemplate tmpl;
  for (SliceId id = 0; id < 30; ++id) {
    const Nspr s = sample_nspr(tmpl, id, 0, rng);
    std::vector<NodeId> hosts;
    for (int i = 0; i < s.vnf_count(); ++i) hosts.push_back(static_cast<NodeId>((id * 7 + i) % 100));
    const auto r = assemble_decision(net, s, hosts);
    if (auto* d = std::get_if<PlacementDecision>(&r)) {
      net.allocate(id, *d);
    }
  }
  LoadModel model;
  model.lambda_base = 0.3;
  Units used = 0, cap = 0;
  for (const auto& s : net.servers()) {
    used += s.cpu_capacity - s.cpu_available;
    cap += s.cpu_capacity;
  }
  REQUIRE(used > 0);
  const double rho = 0.3 * 100 * 12.5 / cap;
  LoadEstimate est{offered_load(model, tmpl, net, 0), utilization(net).overall.cpu};
  const Eigen::VectorXd e = featurize(net, n, 1, 4, est, AgentVariant::edrl());
  REQUIRE(e.size() == 3 * 100 + 7);
  CHECK(e(305) == doctest::Approx(std::min(rho, 2.0) / 2.0).epsilon(1e-12));
  CHECK(e(306) == doctest::Approx(double(used) / cap).epsilon(1e-12));
  CHECK(e.minCoeff() >= -1.0);
  CHECK(e.maxCoeff() <= 1.0);
  bool some_partial = false;
  for (Eigen::Index i = 0; i < 300; ++i) some_partial |= e(i) < 1.0;
  CHECK(some_partial);

  LoadEstimate hot{5.0, 0.5};
  CHECK(featurize(net, n, 0, std::nullopt, hot, AgentVariant::haedrl())(305) == 1.0);
}

TEST_CASE("policy forward: zero weights, reference oracle, masking, dimensions") {
  const std::vector<int> sizes{6, 5, 4, 3};
  const Mlp zero(sizes);
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(6, -1, 1);
  const ActionMask mask{1, 0, 1};
  const Eigen::VectorXd logits = policy_forward(zero, x, mask);
  CHECK(logits(0) == 0.0);
  CHECK(std::isinf(logits(1)));
  CHECK(logits(2) == 0.0);
  const Eigen::VectorXd p = ha_distribution(logits, {}, 0.0);
  CHECK(p(0) == doctest::Approx(0.5));
  CHECK(p(1) == 0.0);
  CHECK(p(2) == doctest::Approx(0.5));

  const ActionMask none{0, 0, 0};
  CHECK_THROWS_AS(ha_distribution(policy_forward(zero, x, none), {}, 0.0), NoFeasibleAction);
  const ActionMask wrong{1, 1};
  CHECK_THROWS_AS(policy_forward(zero, x, wrong), DimensionMismatch);
  CHECK_THROWS_AS(policy_forward(zero, Eigen::VectorXd::Zero(4), mask), DimensionMismatch);

  Rng rng = make_stream(9, 7);
  for (int trial = 0; trial < 20; ++trial) {
    const Mlp net = Mlp::glorot(sizes, rng, 1.0);
    Eigen::VectorXd in(6);
    std::vector<double> raw(6);
    for (int i = 0; i < 6; ++i) raw[i] = in(i) = std::uniform_real_distribution<double>(-1, 1)(rng);
    const ActionMask all{1, 1, 1};
    const Eigen::VectorXd got = policy_forward(net, in, all);
    const auto want = reference_forward(net, raw);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(got(i) - want[i]) <= 1e-12);
  }
}

TEST_CASE("heuristic-shifted distribution") {
  Eigen::VectorXd logits(4);
  logits << 0.3, -1.2, 2.0, -std::numeric_limits<double>::infinity();
  const std::vector<double> h{0, 1, 0, 0};

  const Eigen::VectorXd plain = ha_distribution(logits, {}, 0.0);
  const Eigen::VectorXd zero_beta = ha_distribution(logits, h, 0.0);
  CHECK(plain == zero_beta);
  const auto ref = reference_softmax({0.3, -1.2, 2.0, -INFINITY});
  for (int i = 0; i < 4; ++i) CHECK(std::abs(plain(i) - ref[i]) <= 1e-15);
  CHECK(plain(3) == 0.0);

  Eigen::VectorXd two(3);
  two << 0.7, 0.7, -std::numeric_limits<double>::infinity();
  const std::vector<double> hj{1, 0, 0};
  CHECK(ha_distribution(two, hj, std::log(9.0))(0) == doctest::Approx(0.9).epsilon(1e-12));

  const Eigen::VectorXd shifted = ha_distribution(logits.array() + 123.456, h, 1.5);
  const Eigen::VectorXd base = ha_distribution(logits, h, 1.5);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(shifted(i) - base(i)) <= 1e-12);

  double previous = -1.0;
  for (double beta = 0.0; beta <= 10.0; beta += 0.25) {
    const Eigen::VectorXd p = ha_distribution(logits, h, beta);
    CHECK(std::abs(p.sum() - 1.0) <= 1e-9);
    CHECK(p.minCoeff() >= 0.0);
    CHECK(p(3) == 0.0);
    CHECK(p(1) >= previous);
    previous = p(1);
  }
  CHECK_THROWS_AS(ha_distribution(logits, std::vector<double>{1, 0}, 1.0), DimensionMismatch);
}

TEST_CASE("categorical sampling") {
  Eigen::VectorXd one_hot = Eigen::VectorXd::Zero(5);
  one_hot(3) = 1.0;
  Rng rng = make_stream(4, kPolicyStream);
  for (int i = 0; i < 100; ++i) CHECK(select_action(one_hot, rng).index == 3);
  CHECK(select_action(one_hot, rng).log_prob == 0.0);

  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(4, 0.25);
  const int n = 100000;
  std::array<int, 4> counts{};
  for (int i = 0; i < n; ++i) ++counts[select_action(uniform, rng).index];
  const double sigma = std::sqrt(n * 0.25 * 0.75);
  for (int c : counts) CHECK(std::abs(c - n * 0.25) <= 3 * sigma);

  Rng a = make_stream(8, kPolicyStream), b = make_stream(8, kPolicyStream);
  for (int i = 0; i < 1000; ++i) CHECK(select_action(uniform, a).index == select_action(uniform, b).index);

  Eigen::VectorXd tie(3);
  tie << 0.4, 0.2, 0.4;
  CHECK(greedy_action(tie).index == 0);
  CHECK_THROWS_AS(greedy_action(Eigen::VectorXd::Zero(3)), NoFeasibleAction);
}

TEST_CASE("episode reward arithmetic") {
  const RewardConfig cfg;
  CHECK(episode_reward(false, {}, cfg, 10.0) == -1.0);
  DecisionCost full;
  full.max_server_utilization_after = 1.0;
  CHECK(episode_reward(true, full, cfg, 10.0) == 1.0);
  DecisionCost half;
  half.max_server_utilization_after = 0.5;
  half.total_bw_consumed = 1;
  CHECK(episode_reward(true, half, cfg, 10.0) == doctest::Approx(1.225).epsilon(1e-12));
}

TEST_CASE("exact critic and zero entropy weight leave the actor untouched") {
  Rng rng = make_stream(2, 7);
  const std::vector<int> sizes{4, 6, 3};
  Mlp actor = Mlp::glorot(sizes, rng);
  const std::vector<int> critic_sizes{4, 5, 1};
  Mlp critic(critic_sizes);
  Trajectory traj;
  traj.reward = 0.8;
  traj.steps.push_back({Eigen::VectorXd::Constant(4, 0.5), {1, 1, 0}, 1, 0.0, {}, 0.0, 0.0});
  critic.layers().back().bias(0) = 0.8;  // V(s) == G exactly

  TrainingConfig cfg;
  cfg.entropy_weight = 0.0;
  const Mlp before = actor;
  update(actor, critic, traj, cfg);
  CHECK(actor == before);

  // with entropy weight the step raises the policy's entropy
  cfg.entropy_weight = 0.5;
  cfg.learning_rate = 0.05;
  auto entropy = [&](const Mlp& a) {
    const Eigen::VectorXd p = ha_distribution(policy_forward(a, traj.steps[0].state, traj.steps[0].mask), {}, 0);
    double h = 0;
    for (Eigen::Index i = 0; i < p.size(); ++i) if (p(i) > 0) h -= p(i) * std::log(p(i));
    return h;
  };
  const double h0 = entropy(actor);
  critic = Mlp(critic_sizes);
  critic.layers().back().bias(0) = 0.8;
  update(actor, critic, traj, cfg);
  CHECK(entropy(actor) > h0);
}

TEST_CASE("single-step update matches a hand-derived gradient step") {
  // Actor: z = W x + b (2 inputs, 2 actions). Critic: V = w.x + c.
  const std::vector<int> a_sizes{2, 2}, c_sizes{2, 1};
  Mlp actor(a_sizes), critic(c_sizes);
  actor.layers()[0].weight << 0.2, -0.4, 0.1, 0.3;
  actor.layers()[0].bias << 0.05, -0.05;
  critic.layers()[0].weight << 0.5, -0.25;
  critic.layers()[0].bias << 0.1;
  const double x0 = 1.0, x1 = -2.0;
  Trajectory traj;
  traj.reward = 1.3;
  traj.steps.push_back({(Eigen::VectorXd(2) << x0, x1).finished(), {1, 1}, 0, 0.0, {}, 0.0, 0.0});

  TrainingConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.entropy_weight = 0.02;
  cfg.gamma = 0.9;

  const double z0 = 0.2 * x0 - 0.4 * x1 + 0.05;
  const double z1 = 0.1 * x0 + 0.3 * x1 - 0.05;
  const double p0 = 1.0 / (1.0 + std::exp(z1 - z0));
  const double p1 = 1.0 - p0;
  const double v = 0.5 * x0 - 0.25 * x1 + 0.1;
  const double adv = 1.3 - v;
  const double ent = -(p0 * std::log(p0) + p1 * std::log(p1));
  const double g0 = adv * (p0 - 1.0) + 0.02 * p0 * (std::log(p0) + ent);
  const double g1 = adv * p1 + 0.02 * p1 * (std::log(p1) + ent);
  const double dv = -2.0 * adv;

  const LossReport loss = update(actor, critic, traj, cfg);
  CHECK(loss.actor_loss == doctest::Approx(-adv * std::log(p0) - 0.02 * ent).epsilon(1e-12));
  CHECK(loss.critic_loss == doctest::Approx(adv * adv).epsilon(1e-12));

  const auto& W = actor.layers()[0].weight;
  const auto& b = actor.layers()[0].bias;
  CHECK(std::abs(W(0, 0) - (0.2 - 0.1 * g0 * x0)) <= 1e-10);
  CHECK(std::abs(W(0, 1) - (-0.4 - 0.1 * g0 * x1)) <= 1e-10);
  CHECK(std::abs(W(1, 0) - (0.1 - 0.1 * g1 * x0)) <= 1e-10);
  CHECK(std::abs(W(1, 1) - (0.3 - 0.1 * g1 * x1)) <= 1e-10);
  CHECK(std::abs(b(0) - (0.05 - 0.1 * g0)) <= 1e-10);
  CHECK(std::abs(b(1) - (-0.05 - 0.1 * g1)) <= 1e-10);
  const auto& w = critic.layers()[0].weight;
  CHECK(std::abs(w(0, 0) - (0.5 - 0.1 * dv * x0)) <= 1e-10);
  CHECK(std::abs(w(0, 1) - (-0.25 - 0.1 * dv * x1)) <= 1e-10);
  CHECK(std::abs(critic.layers()[0].bias(0) - (0.1 - 0.1 * dv)) <= 1e-10);
}

TEST_CASE("discounted returns: earlier steps see gamma powers of the terminal reward") {
  // zero actor and critic, so the critic loss is sum_t G_t^2
  const std::vector<int> sizes{3, 2}, c_sizes{3, 1};
  const Mlp actor(sizes), critic(c_sizes);
  Trajectory traj;
  traj.reward = 2.0;
  for (int t = 0; t < 3; ++t) traj.steps.push_back({Eigen::VectorXd::Zero(3), {1, 1}, 0, 0, {}, 0, 0});
  TrainingConfig cfg;
  cfg.gamma = 0.5;
  const auto g = episode_gradients(actor, critic, traj, cfg);
  CHECK(g.loss.critic_loss == doctest::Approx(0.25 + 1.0 + 4.0));
}

TEST_CASE("finite-difference agreement") {
  Rng rng = make_stream(11, 7);
  const std::vector<int> sizes{5, 4, 3, 4};
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(5, -0.8, 0.9);
  const ActionMask mask{1, 0, 1, 1};
  const std::vector<double> h{0, 0, 1, 0};

  const Mlp zero(sizes);
  CHECK(grad_check(zero, x, mask, h, 0.0, 3, 0.7) <= 1e-6);

  for (int trial = 0; trial < 5; ++trial) {
    const Mlp net = Mlp::glorot(sizes, rng);
    const double e0 = grad_check(net, x, mask, h, 0.0, 2, -1.3);
    const double e5 = grad_check(net, x, mask, h, 5.0, 2, -1.3);
    CHECK(e0 <= 1e-4);
    CHECK(e5 <= 1e-4);
  }

  // shift invariance of the loss value
  Mlp net = Mlp::glorot(sizes, rng);
  auto loss = [&](const Mlp& m) {
    return -std::log(ha_distribution(policy_forward(m, x, mask), h, 2.0)(0));
  };
  const double before = loss(net);
  net.layers().back().bias.array() += 3.0;
  CHECK(std::abs(loss(net) - before) <= 1e-12);

  const GradCheckSummary s = run_gradcheck_suite(25, 3);
  CHECK(s.configurations == 25);
  CHECK(s.max_relative_error <= 1e-4);
}

TEST_CASE("non-finite gradients abort the step") {
  const std::vector<int> sizes{2, 2}, c_sizes{2, 1};
  Mlp actor(sizes), critic(c_sizes);
  critic.layers()[0].weight << 1e308, 1e308;
  Trajectory traj;
  traj.reward = 1.0;
  traj.steps.push_back({(Eigen::VectorXd(2) << 1e308, 1e308).finished(), {1, 1}, 0, 0, {}, 0, 0});
  const auto a0 = actor.flatten(), c0 = critic.flatten();
  CHECK_THROWS_AS(update(actor, critic, traj, TrainingConfig{}), NonFiniteGradient);
  CHECK(actor.flatten() == a0);
  CHECK(critic.flatten() == c0);
}

TEST_CASE("checkpoint round trip and format") {
  Rng rng = make_stream(5, kInitStream);
  const std::vector<int> sizes{7, 4, 3};
  const Mlp net = Mlp::glorot(sizes, rng);
  const fs::path file = scratch("net.ckpt");
  save_checkpoint(file, net);
  CHECK(load_checkpoint(file) == net);

  std::ifstream in(file, std::ios::binary);
  std::string header;
  std::getline(in, header);
  CHECK(header == "slicesim-mlp 1 7 4 3");
  const std::size_t params = 7 * 4 + 4 + 4 * 3 + 3;
  CHECK(fs::file_size(file) == header.size() + 1 + 8 * params);

  // first parameter is W0(0,0), little-endian
  char bytes[8];
  in.read(bytes, 8);
  double first = 0;
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | static_cast<unsigned char>(bytes[i]);
  std::memcpy(&first, &bits, 8);
  CHECK(first == net.layers()[0].weight(0, 0));

  const std::vector<int> one_sizes{1, 1};
  Mlp one(one_sizes);
  one.layers()[0].weight(0, 0) = 1.0;
  save_checkpoint(scratch("one.ckpt"), one);
  std::ifstream raw(scratch("one.ckpt"), std::ios::binary);
  std::string h1;
  std::getline(raw, h1);
  unsigned char w[8];
  raw.read(reinterpret_cast<char*>(w), 8);
  CHECK(w[6] == 0xF0);
  CHECK(w[7] == 0x3F);

  {
    std::ofstream bad(scratch("bad.ckpt"), std::ios::binary);
    bad << "not-a-checkpoint 1 2 2\n";
  }
  CHECK_THROWS_AS(load_checkpoint(scratch("bad.ckpt")), IoError);
  fs::resize_file(file, fs::file_size(file) - 3);
  CHECK_THROWS_AS(load_checkpoint(file), IoError);
  save_checkpoint(file, net);
  {
    std::ofstream extra(file, std::ios::binary | std::ios::app);
    extra << 'x';
  }
  CHECK_THROWS_AS(load_checkpoint(file), IoError);
  CHECK_THROWS_AS(load_checkpoint(scratch("missing.ckpt")), IoError);
}

TEST_CASE("agent construction, heuristic decay, checksum") {
  const PhysicalNetwork net = desk();
  TrainingConfig cfg;
  cfg.beta = 3.0;
  cfg.beta_decay = 0.5;
  Rng r1 = make_stream(1, kInitStream), r2 = make_stream(1, kInitStream);
  Agent ha(net, AgentVariant::hadrl(), cfg, {}, r1);
  Agent plain(net, AgentVariant::drl(), cfg, {}, r2);
  CHECK(ha.actor() == plain.actor());
  CHECK(ha.critic() == plain.critic());
  CHECK(ha.checksum() == plain.checksum());
  CHECK(ha.actor().sizes() == std::vector<int>{305, 128, 64, 100});
  CHECK(ha.critic().sizes() == std::vector<int>{305, 128, 64, 1});

  CHECK(ha.current_beta() == 3.0);
  ha.finish_episode();
  ha.finish_episode();
  CHECK(ha.current_beta() == 0.75);
  CHECK(plain.current_beta() == 0.0);

  Rng r3 = make_stream(1, kInitStream);
  Agent e(net, AgentVariant::edrl(), cfg, {}, r3);
  CHECK(e.actor().input_size() == 307);

  const std::uint64_t before = plain.checksum();
  Trajectory traj;
  traj.reward = 1.0;
  ActionMask all(100, 1);
  traj.steps.push_back({featurize(net, request(), 0, std::nullopt, {}, AgentVariant::drl()), all, 5, 0, {}, 0, 0});
  update(plain.actor(), plain.critic(), traj, cfg);
  CHECK(plain.checksum() != before);

  TrainingConfig invalid;
  invalid.gamma = 1.5;
  CHECK_THROWS_AS(invalid.validate(), ConfigError);
  invalid = TrainingConfig{};
  invalid.beta_decay = 0.0;
  CHECK_THROWS_AS(invalid.validate(), ConfigError);
}
