#include <benchmark/benchmark.h>

#include <random>

#include "engage/badge_design.hpp"
#include "engage/badge_simulator.hpp"
#include "engage/lp.hpp"
#include "engage/recommender.hpp"

namespace {

void BM_OptimizeThresholds(benchmark::State& state) {
  const auto dist = engage::MotivationDistribution::uniform(0.0, 5.0);
  const int tiers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(engage::optimize_thresholds(dist, tiers));
  }
}
BENCHMARK(BM_OptimizeThresholds)->Arg(3)->Arg(10)->Arg(50);

void BM_EstimateValue(benchmark::State& state) {
  const auto dist = engage::MotivationDistribution::uniform(0.0, 5.0);
  const auto policy = engage::BadgePolicy::make({195.0 / 128.0, 15.0 / 8.0, 2.5});
  for (auto _ : state) {
    benchmark::DoNotOptimize(engage::estimate_value(policy, dist, state.range(0), 42, 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EstimateValue)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

std::vector<engage::UserProfile> random_users(std::size_t n, std::mt19937_64& gen) {
  std::vector<engage::UserProfile> users;
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < n; ++i) {
    engage::UserProfile u;
    u.id = "u" + std::to_string(i);
    for (auto c : engage::kAllCategories) {
      if (coin(gen)) u.desired_categories.insert(c);
    }
    for (auto a : engage::kAllActivities) {
      if (coin(gen)) u.desired_activities.insert(a);
    }
    users.push_back(std::move(u));
  }
  return users;
}

std::vector<engage::Business> random_businesses(std::size_t n, std::mt19937_64& gen) {
  std::vector<engage::Business> out;
  std::uniform_int_distribution<int> cat(0, 3);
  std::uniform_int_distribution<int> act(0, 2);
  for (std::size_t i = 0; i < n; ++i) {
    engage::Business b;
    b.id = "b" + std::to_string(i);
    b.name = b.id;
    b.category = engage::kAllCategories[cat(gen)];
    const int a = act(gen);
    if (a != 1) b.offered_activities.insert(engage::Activity::explore);
    if (a != 0) b.offered_activities.insert(engage::Activity::social);
    out.push_back(std::move(b));
  }
  return out;
}

void BM_SolvePlan(benchmark::State& state) {
  std::mt19937_64 gen(7);
  const auto users = random_users(static_cast<std::size_t>(state.range(0)), gen);
  const auto businesses = random_businesses(static_cast<std::size_t>(state.range(1)), gen);
  for (auto _ : state) {
    benchmark::DoNotOptimize(engage::solve_plan(users, businesses, {}));
  }
}
BENCHMARK(BM_SolvePlan)->Args({50, 10})->Args({200, 15})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
