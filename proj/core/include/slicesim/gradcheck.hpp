#pragma once

#include <cstdint>

namespace slicesim {

struct GradCheckSummary {
  int configurations = 0;
  double max_relative_error = 0.0;
};

// Draws `configurations` random small actor/critic pairs and trajectories
// (masks, heuristic bias, entropy and imitation terms all randomized) and
// compares backprop against central finite differences on each.
GradCheckSummary run_gradcheck_suite(int configurations, std::uint64_t seed,
                                     double epsilon = 1e-5);

}  // namespace slicesim
