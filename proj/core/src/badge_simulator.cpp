#include "engage/badge_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "engage/errors.hpp"
#include "engage/rng.hpp"

namespace engage {
namespace {

// Hot-path variant of simulate_user that does not record draws.
template <typename NextDraw>
double run_user(const std::vector<double>& increments, NextDraw&& next_draw) {
  double total = 0.0;
  for (double t : increments) {
    const double v = next_draw();
    if (v < t) return total + v;
    total += t;
  }
  return total + next_draw();
}

// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

SimulationEstimate summarize(const std::vector<double>& totals, std::uint64_t seed) {
  CompensatedSum s;
  for (double x : totals) s.add(x);
  const auto n = static_cast<double>(totals.size());
  const double mean = s.value() / n;

  CompensatedSum sq;
  for (double x : totals) sq.add((x - mean) * (x - mean));
  const double var = totals.size() > 1 ? sq.value() / (n - 1.0) : 0.0;

  SimulationEstimate est;
  est.mean = mean;
  est.stderr_ = std::sqrt(var / n);
  est.replications = static_cast<std::int64_t>(totals.size());
  est.seed = seed;
  return est;
}

unsigned resolve_workers(unsigned workers, std::int64_t replications) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  const auto cap = static_cast<unsigned>(std::min<std::int64_t>(replications, 64));
  return std::max(1u, std::min(workers, cap));
}

std::vector<double> replicate(const BadgePolicy& policy, const MotivationDistribution& dist,
                              std::int64_t replications, std::uint64_t seed,
                              unsigned workers) {
  std::vector<double> totals(static_cast<std::size_t>(replications));
  const auto body = [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      SplitMix64 gen(derive_seed(seed, static_cast<std::uint64_t>(i)));
      totals[static_cast<std::size_t>(i)] =
          run_user(policy.increments, [&] { return dist.sample(gen); });
    }
  };

  const unsigned n = resolve_workers(workers, replications);
  if (n == 1) {
    body(0, replications);
    return totals;
  }
  {
    std::vector<std::jthread> pool;
    pool.reserve(n);
    const std::int64_t chunk = (replications + n - 1) / n;
    for (unsigned w = 0; w < n; ++w) {
      const std::int64_t begin = chunk * w;
      const std::int64_t end = std::min(replications, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(body, begin, end);
    }
  }
  return totals;
}

}  // namespace

UserTrajectory simulate_user(const BadgePolicy& policy, const DrawSource& next_draw) {
  UserTrajectory out;
  for (double t : policy.increments) {
    const double v = next_draw();
    out.draws.push_back(v);
    if (v < t) {
      out.activities_completed += v;
      return out;
    }
    out.activities_completed += t;
    ++out.tiers_earned;
  }
  const double terminal = next_draw();
  out.draws.push_back(terminal);
  out.activities_completed += terminal;
  return out;
}

SimulationEstimate estimate_value(const BadgePolicy& policy, const MotivationDistribution& dist,
                                  std::int64_t replications, std::uint64_t seed,
                                  unsigned workers) {
  if (replications <= 0) throw ValidationError("replications must be at least 1");
  return summarize(replicate(policy, dist, replications, seed, workers), seed);
}

std::vector<SimulationEstimate> compare_policies(const MotivationDistribution& dist,
                                                 const std::vector<BadgePolicy>& policies,
                                                 std::int64_t replications, std::uint64_t seed,
                                                 unsigned workers) {
  if (policies.empty()) throw ValidationError("compare_policies needs at least one policy");
  if (replications <= 0) throw ValidationError("replications must be at least 1");
  std::vector<SimulationEstimate> out;
  out.reserve(policies.size());
  for (const auto& policy : policies) {
    out.push_back(estimate_value(policy, dist, replications, seed, workers));
  }
  return out;
}

}  // namespace engage
