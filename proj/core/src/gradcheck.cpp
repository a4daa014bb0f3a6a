#include "slicesim/gradcheck.hpp"

#include <algorithm>
#include <vector>

#include "slicesim/agent.hpp"
#include "slicesim/rng.hpp"

namespace slicesim {

GradCheckSummary run_gradcheck_suite(int configurations, std::uint64_t seed, double epsilon) {
  Rng rng = make_stream(seed, 7);
  auto uniform_int = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto uniform = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  GradCheckSummary summary;
  for (int c = 0; c < configurations; ++c) {
    const int inputs = uniform_int(2, 10);
    const int actions = uniform_int(2, 6);
    std::vector<int> sizes{inputs};
    for (int h = uniform_int(0, 2); h > 0; --h) sizes.push_back(uniform_int(2, 8));
    sizes.push_back(actions);
    Mlp actor = Mlp::glorot(sizes, rng, uniform(0.1, 2.0));
    sizes.back() = 1;
    Mlp critic = Mlp::glorot(sizes, rng, 1.0);
    for (auto* net : {&actor, &critic}) {
      for (auto& layer : net->layers()) {
        for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = uniform(-0.5, 0.5);
      }
    }

    TrainingConfig config;
    config.gamma = uniform(0.5, 1.0);
    config.entropy_weight = uniform_int(0, 1) ? uniform(0.0, 0.1) : 0.0;
    config.ha_loss_weight = uniform_int(0, 1) ? uniform(0.0, 0.5) : 0.0;

    Trajectory traj;
    traj.reward = uniform(-1.0, 2.0);
    for (int t = uniform_int(1, 4); t > 0; --t) {
      TrajectoryStep step;
      step.state = Eigen::VectorXd(inputs);
      for (int i = 0; i < inputs; ++i) step.state(i) = uniform(-1.0, 1.0);
      step.mask.assign(static_cast<std::size_t>(actions), 1);
      for (auto& m : step.mask) m = uniform(0.0, 1.0) < 0.75 ? 1 : 0;
      step.action = uniform_int(0, actions - 1);
      step.mask[static_cast<std::size_t>(step.action)] = 1;
      if (uniform_int(0, 2) > 0) {
        step.heuristic.assign(static_cast<std::size_t>(actions), 0.0);
        step.heuristic[static_cast<std::size_t>(uniform_int(0, actions - 1))] = 1.0;
        step.beta = uniform_int(0, 1) ? uniform(0.0, 5.0) : 0.0;
      }
      traj.steps.push_back(std::move(step));
    }
    summary.max_relative_error = std::max(summary.max_relative_error,
                                          grad_check_episode(actor, critic, traj, config, epsilon));
    ++summary.configurations;
  }
  return summary;
}

}  // namespace slicesim
