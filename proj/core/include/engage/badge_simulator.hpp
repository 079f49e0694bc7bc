#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "engage/badge_design.hpp"
#include "engage/motivation.hpp"

namespace engage {

struct UserTrajectory {
  std::vector<double> draws;
  double activities_completed = 0.0;
  std::size_t tiers_earned = 0;
};

struct SimulationEstimate {
  double mean = 0.0;
  // sample standard deviation / sqrt(replications)
  double stderr_ = 0.0;
  std::int64_t replications = 0;
  std::uint64_t seed = 0;
};

// Draw source for one user. Returning a scripted sequence lets tests
// hand-trace the mechanics.
using DrawSource = std::function<double()>;

// Runs one user through the renewal model: a draw at or above the current
// increment earns the tier after exactly that many activities and refreshes
// motivation; a draw below it is performed in full and the user leaves. After
// the last tier one terminal draw is performed in full.
UserTrajectory simulate_user(const BadgePolicy& policy, const DrawSource& next_draw);

template <std::uniform_random_bit_generator Gen>
UserTrajectory simulate_user(const BadgePolicy& policy, const MotivationDistribution& dist,
                             Gen& gen) {
  return simulate_user(policy, [&] { return dist.sample(gen); });
}

// Replication i draws from its own SplitMix64 stream seeded by
// derive_seed(seed, i), so the result does not depend on `workers`.
// workers == 0 picks std::thread::hardware_concurrency().
SimulationEstimate estimate_value(const BadgePolicy& policy, const MotivationDistribution& dist,
                                  std::int64_t replications, std::uint64_t seed,
                                  unsigned workers = 0);

// One estimate per policy with common random numbers: replication i of every
// policy consumes the same draw stream.
std::vector<SimulationEstimate> compare_policies(const MotivationDistribution& dist,
                                                 const std::vector<BadgePolicy>& policies,
                                                 std::int64_t replications, std::uint64_t seed,
                                                 unsigned workers = 0);

}  // namespace engage
