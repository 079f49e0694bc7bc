#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "engage/badge_design.hpp"
#include "engage/errors.hpp"
#include "oracles.hpp"

namespace {

using engage::BadgePolicy;
using engage::MotivationDistribution;
using engage::RoundingMode;
using engage::ValidationError;

const auto kU05 = MotivationDistribution::uniform(0, 5);

MotivationDistribution mixture() {
  return MotivationDistribution::from_family(std::make_shared<engage::UniformMixtureFamily>(
      std::vector<engage::UniformMixtureFamily::Component>{{0.5, 0.0, 1.0}, {0.5, 4.0, 5.0}}));
}

MotivationDistribution random_dist(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (gen() % 3) {
    case 0: {
      double a = 4 * u(gen);
      return MotivationDistribution::uniform(a, a + 0.5 + 6 * u(gen));
    }
    case 1:
      return MotivationDistribution::exponential(0.2 + 3 * u(gen));
    default: {
      double a = 2 * u(gen), b = a + 0.5 + u(gen), c = b + 2 * u(gen);
      return MotivationDistribution::from_family(std::make_shared<engage::UniformMixtureFamily>(
          std::vector<engage::UniformMixtureFamily::Component>{
              {0.2 + u(gen), a, b}, {0.2 + u(gen), c, c + 0.5 + 3 * u(gen)}}));
    }
  }
}

BadgePolicy random_policy(std::mt19937_64& gen, double scale) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> inc(1 + gen() % 5);
  for (auto& t : inc) t = 1.3 * scale * u(gen);
  return BadgePolicy::make(inc);
}

TEST(StageValue, Examples) {
  EXPECT_DOUBLE_EQ(engage::stage_value(kU05, 2.5, 2.5), 25.0 / 8);
  for (double c : {0.0, 1.0, 3.7}) {
    EXPECT_DOUBLE_EQ(engage::stage_value(kU05, c, 0.0), c);
    EXPECT_DOUBLE_EQ(engage::stage_value(MotivationDistribution::exponential(2), c, 0.0), c);
  }
  auto e1 = MotivationDistribution::exponential(1);
  for (double t : {0.0, 0.3, 1.0, 2.5, 10.0, 40.0}) {
    EXPECT_NEAR(engage::stage_value(e1, 1.0, t), 1.0, 1e-12) << t;
  }
}

TEST(StageValue, InvalidInput) {
  EXPECT_THROW(engage::stage_value(kU05, 1.0, -0.1), ValidationError);
  EXPECT_THROW(engage::stage_value(kU05, -1.0, 1.0), ValidationError);
}

TEST(StageValue, MatchesHandFormula) {
  for (double c : {0.0, 1.0, 2.5, 4.0}) {
    for (double t = 0; t <= 6; t += 0.125) {
      EXPECT_NEAR(engage::stage_value(kU05, c, t), oracle::uniform_stage(0, 5, c, t), 1e-13);
    }
  }
}

TEST(OptimalStage, Examples) {
  auto s2 = engage::optimal_stage_threshold(kU05, 25.0 / 8);
  EXPECT_NEAR(s2.threshold, 15.0 / 8, 1e-10);
  EXPECT_NEAR(s2.value, 445.0 / 128, 1e-12);
  EXPECT_TRUE(s2.interior);
  EXPECT_FALSE(s2.used_scan);

  auto s1 = engage::optimal_stage_threshold(kU05, 445.0 / 128);
  EXPECT_NEAR(s1.threshold, 195.0 / 128, 1e-10);
  EXPECT_NEAR(s1.value, 121525.0 / 32768, 1e-12);

  auto e = engage::optimal_stage_threshold(MotivationDistribution::exponential(1), 1.0);
  EXPECT_EQ(e.threshold, 0.0);
  EXPECT_NEAR(e.value, 1.0, 1e-12);
}

TEST(OptimalStage, GoldenSectionConfirmsDenominator) {
  auto f = [](double t) { return oracle::uniform_stage(0, 5, 445.0 / 128, t); };
  const double t = oracle::golden_max(f, 0, 5);
  EXPECT_NEAR(t, 195.0 / 128, 1e-6);
  EXPECT_NEAR(f(t), 121525.0 / 32768, 1e-12);
  // a 32786 denominator would be off by ~0.002, far outside any tolerance
  EXPECT_GT(std::abs(f(t) - 121525.0 / 32786), 1e-3);
}

TEST(OptimalStage, NonFiniteContinuation) {
  EXPECT_THROW(engage::optimal_stage_threshold(kU05, std::nan("")), ValidationError);
  EXPECT_THROW(engage::optimal_stage_threshold(kU05, INFINITY), ValidationError);
}

TEST(OptimalStage, BoundaryOptima) {
  // continuation beyond the support width: the best threshold is the support minimum
  auto lo = engage::optimal_stage_threshold(MotivationDistribution::uniform(2, 4), 10.0);
  EXPECT_EQ(lo.threshold, 2.0);
  EXPECT_FALSE(lo.interior);
  EXPECT_NEAR(lo.value, 12.0, 1e-12);
}

TEST(Optimize, UniformZeroFiveThreeTiers) {
  auto sol = engage::optimize_thresholds(kU05, 3);
  ASSERT_EQ(sol.policy.tiers(), 3u);
  EXPECT_NEAR(sol.policy.increments[0], 195.0 / 128, 1e-9);
  EXPECT_NEAR(sol.policy.increments[1], 15.0 / 8, 1e-9);
  EXPECT_NEAR(sol.policy.increments[2], 5.0 / 2, 1e-9);
  ASSERT_EQ(sol.stage_values.size(), 4u);
  EXPECT_DOUBLE_EQ(sol.stage_values[0], 2.5);
  EXPECT_NEAR(sol.stage_values[1], 25.0 / 8, 1e-12);
  EXPECT_NEAR(sol.stage_values[2], 445.0 / 128, 1e-12);
  EXPECT_NEAR(sol.stage_values[3], 121525.0 / 32768, 1e-12);
  EXPECT_NEAR(sol.optimal_value, 3.7086, 1e-4);
  EXPECT_EQ(sol.policy.tier_names, (std::vector<std::string>{"bronze", "silver", "gold"}));
  EXPECT_FALSE(sol.used_scan);
}

TEST(Optimize, SingleTier) {
  auto sol = engage::optimize_thresholds(kU05, 1);
  ASSERT_EQ(sol.policy.tiers(), 1u);
  EXPECT_NEAR(sol.policy.increments[0], 2.5, 1e-9);
  EXPECT_NEAR(sol.optimal_value, 25.0 / 8, 1e-12);
  EXPECT_EQ(sol.policy.tier_names, (std::vector<std::string>{"tier1"}));
}

TEST(Optimize, InvalidTiers) {
  EXPECT_THROW(engage::optimize_thresholds(kU05, 0), ValidationError);
  EXPECT_THROW(engage::optimize_thresholds(kU05, -2), ValidationError);
}

TEST(Optimize, ExponentialValueIsMean) {
  for (double rate : {0.5, 1.0, 3.0}) {
    auto d = MotivationDistribution::exponential(rate);
    for (int k = 1; k <= 5; ++k) {
      auto sol = engage::optimize_thresholds(d, k);
      EXPECT_NEAR(sol.optimal_value, 1 / rate, 1e-9);
      for (double t : sol.policy.increments) EXPECT_EQ(t, 0.0);
    }
  }
}

TEST(Optimize, MatchesIndependentDynamicProgram) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int rep = 0; rep < 40; ++rep) {
    double a = 5 * u(gen), b = a + 0.1 + 8 * u(gen);
    int k = 1 + rep % 5;
    auto sol = engage::optimize_thresholds(MotivationDistribution::uniform(a, b), k);
    auto ref = oracle::uniform_design(a, b, k);
    for (int i = 0; i < k; ++i) EXPECT_NEAR(sol.policy.increments[i], ref.increments[i], 1e-6);
    for (int i = 0; i <= k; ++i) EXPECT_NEAR(sol.stage_values[i], ref.stage_values[i], 1e-10);
  }
}

TEST(Optimize, NonLogConcaveFallsBackToScan) {
  auto m = mixture();
  auto sol = engage::optimize_thresholds(m, 3);
  EXPECT_TRUE(sol.used_scan);
  // brute-force grid over the mixture's hand-written stage value
  auto surv = [](double t) {
    auto part = [](double t, double lo, double hi) {
      return t <= lo ? 1.0 : t >= hi ? 0.0 : (hi - t) / (hi - lo);
    };
    return 0.5 * part(t, 0, 1) + 0.5 * part(t, 4, 5);
  };
  auto below = [](double t) {
    auto part = [](double t, double lo, double hi) {
      double c = std::clamp(t, lo, hi);
      return (c * c - lo * lo) / (2 * (hi - lo));
    };
    return 0.5 * part(t, 0, 1) + 0.5 * part(t, 4, 5);
  };
  double w = 2.5;
  for (int stage = 1; stage <= 3; ++stage) {
    double best = -1;
    for (double t = 0; t <= 5; t += 1e-5) best = std::max(best, (t + w) * surv(t) + below(t));
    EXPECT_NEAR(sol.stage_values[stage], best, 1e-8);
    w = sol.stage_values[stage];
  }
}

TEST(Expected, Examples) {
  EXPECT_NEAR(engage::expected_activities(
                  kU05, BadgePolicy::make({195.0 / 128, 15.0 / 8, 2.5})),
              121525.0 / 32768, 1e-12);
  EXPECT_NEAR(engage::expected_activities(kU05, BadgePolicy::make({0, 0, 0})), 2.5, 1e-15);
  EXPECT_NEAR(engage::expected_activities(kU05, BadgePolicy::make({6, 1, 1})),
              kU05.truncated_mean_below(5), 1e-15);
}

TEST(Expected, ClosedFormMatchesRecursion) {
  std::mt19937_64 gen(2024);
  for (int rep = 0; rep < 1000; ++rep) {
    auto d = random_dist(gen);
    auto p = random_policy(gen, std::min(d.effective_max(), 12.0));
    const double closed = engage::expected_activities(d, p);
    EXPECT_NEAR(closed, engage::expected_activities_recursive(d, p), 1e-9);
    const double ref = oracle::policy_value(
        p.increments, [&](double t) { return d.survival(t); },
        [&](double t) { return d.truncated_mean_below(t); }, d.mean());
    EXPECT_NEAR(closed, ref, 1e-9);
  }
}

TEST(Expected, ExponentialEveryPolicyIsMean) {
  std::mt19937_64 gen(5);
  for (int rep = 0; rep < 200; ++rep) {
    double rate = 0.1 + 4 * std::uniform_real_distribution<double>(0, 1)(gen);
    auto d = MotivationDistribution::exponential(rate);
    auto p = random_policy(gen, 3 / rate);
    EXPECT_NEAR(engage::expected_activities(d, p), 1 / rate, 1e-9);
  }
}

TEST(Invariants, FixedPointAtInteriorStages) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int rep = 0; rep < 100; ++rep) {
    double a = 3 * u(gen), b = a + 0.5 + 8 * u(gen);
    auto d = MotivationDistribution::uniform(a, b);
    const int k = 2 + rep % 4;
    auto sol = engage::optimize_thresholds(d, k);
    for (int i = 0; i < k; ++i) {
      if (!sol.interior[i]) continue;
      const double t = sol.policy.increments[i];
      // T_i solves S/f = W_{K-i}; i is zero-based here
      EXPECT_NEAR(d.survival(t) / d.pdf(t) - sol.stage_values[k - 1 - i], 0, 1e-7);
    }
  }
}

TEST(Invariants, PerturbationOptimality) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int rep = 0; rep < 50; ++rep) {
    double a = 3 * u(gen), b = a + 0.5 + 8 * u(gen);
    auto d = MotivationDistribution::uniform(a, b);
    auto sol = engage::optimize_thresholds(d, 1 + rep % 5);
    const double best = engage::expected_activities(d, sol.policy);
    EXPECT_NEAR(best, sol.optimal_value, 1e-10);
    for (std::size_t i = 0; i < sol.policy.tiers(); ++i) {
      for (double delta : {-1e-3, 1e-3}) {
        auto p = sol.policy;
        p.increments[i] = std::max(0.0, p.increments[i] + delta);
        EXPECT_LE(engage::expected_activities(d, p), best + 1e-8);
      }
    }
  }
}

TEST(Invariants, ValueMonotoneInTiersWithDiminishingGains) {
  for (auto d : {kU05, MotivationDistribution::uniform(1, 10), MotivationDistribution::uniform(2, 3),
                 MotivationDistribution::exponential(2)}) {
    double prev = d.mean(), prev_gain = INFINITY;
    for (int k = 1; k <= 8; ++k) {
      double v = engage::optimize_thresholds(d, k).optimal_value;
      EXPECT_GE(v, prev - 1e-12);
      EXPECT_LE(v - prev, prev_gain + 1e-10);
      prev_gain = v - prev;
      prev = v;
    }
  }
}

TEST(Structure, UniformZeroFive) {
  auto sol = engage::optimize_thresholds(kU05, 3);
  auto r = engage::verify_structure(kU05, sol);
  EXPECT_TRUE(r.all_pass());
  EXPECT_NEAR(r.increment_bound, 2.5, 1e-9);
  ASSERT_EQ(r.marginal_gains.size(), 3u);
  EXPECT_NEAR(r.marginal_gains[0], 0.625, 1e-12);
  EXPECT_NEAR(r.marginal_gains[1], 45.0 / 128, 1e-12);
  EXPECT_NEAR(r.marginal_gains[2], 7605.0 / 32768, 1e-12);
  EXPECT_NEAR(*r.monotone_increments.slack, 15.0 / 8 - 195.0 / 128, 1e-9);
  EXPECT_NEAR(*r.bounded_increments.slack, 0.0, 1e-9);
}

TEST(Structure, SingleTierTrivial) {
  auto sol = engage::optimize_thresholds(kU05, 1);
  auto r = engage::verify_structure(kU05, sol);
  EXPECT_TRUE(r.all_pass());
  EXPECT_FALSE(r.monotone_increments.slack.has_value());
  EXPECT_FALSE(r.diminishing_gains.slack.has_value());
}

TEST(Structure, RandomUniformSuiteAgainstGoldenSection) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0, 1);
  for (int rep = 0; rep < 200; ++rep) {
    double a = 5 * u(gen), b = a + 0.1 + 10 * u(gen);
    const int k = 2 + static_cast<int>(gen() % 4);
    auto d = MotivationDistribution::uniform(a, b);
    auto sol = engage::optimize_thresholds(d, k);
    auto r = engage::verify_structure(d, sol);
    EXPECT_TRUE(r.all_pass()) << a << " " << b << " " << k;
    // re-optimize each stage independently
    for (int stage = 1; stage <= k; ++stage) {
      const double c = sol.stage_values[stage - 1];
      const double t = oracle::golden_max(
          [&](double x) { return oracle::uniform_stage(a, b, c, x); }, 0, b);
      EXPECT_NEAR(sol.policy.increments[k - stage], t, 1e-6);
    }
  }
}

TEST(Structure, DetectsViolations) {
  auto sol = engage::optimize_thresholds(kU05, 3);
  std::swap(sol.policy.increments[0], sol.policy.increments[2]);
  auto r = engage::verify_structure(kU05, sol);
  EXPECT_FALSE(r.monotone_increments.pass);
  EXPECT_LT(*r.monotone_increments.slack, 0);

  auto big = engage::optimize_thresholds(kU05, 3);
  big.policy.increments[2] = 3.0;
  EXPECT_FALSE(engage::verify_structure(kU05, big).bounded_increments.pass);
}

TEST(Rounding, Examples) {
  std::vector<double> opt{195.0 / 128, 15.0 / 8, 2.5};
  auto ff = engage::round_policy(opt, RoundingMode::floor_first);
  EXPECT_EQ(ff.increments, (std::vector<std::int64_t>{1, 2, 3}));
  EXPECT_EQ(ff.cumulative, (std::vector<std::int64_t>{1, 3, 6}));

  for (auto mode : {RoundingMode::nearest_half_up, RoundingMode::floor, RoundingMode::ceil,
                    RoundingMode::floor_first}) {
    auto r = engage::round_policy(std::vector<double>{2, 4, 6}, mode);
    EXPECT_EQ(r.increments, (std::vector<std::int64_t>{2, 4, 6}));
    EXPECT_EQ(r.cumulative, (std::vector<std::int64_t>{2, 6, 12}));
  }

  auto z = engage::round_policy(std::vector<double>{0.2, 0.2, 0.2}, RoundingMode::nearest_half_up);
  EXPECT_EQ(z.increments, (std::vector<std::int64_t>{1, 1, 1}));
  EXPECT_EQ(z.cumulative, (std::vector<std::int64_t>{1, 2, 3}));
}

TEST(Rounding, OtherModesOnOptimum) {
  auto sol = engage::optimize_thresholds(kU05, 3);
  EXPECT_EQ(engage::round_policy(sol, RoundingMode::floor_first).cumulative,
            (std::vector<std::int64_t>{1, 3, 6}));
  EXPECT_EQ(engage::round_policy(sol, RoundingMode::nearest_half_up).increments,
            (std::vector<std::int64_t>{2, 2, 3}));
  EXPECT_EQ(engage::round_policy(sol, RoundingMode::floor).increments,
            (std::vector<std::int64_t>{1, 1, 2}));
  EXPECT_EQ(engage::round_policy(sol, RoundingMode::ceil).increments,
            (std::vector<std::int64_t>{2, 2, 3}));
  // values a hair below an integer snap instead of flooring away
  EXPECT_EQ(engage::round_policy(std::vector<double>{3 - 1e-12}, RoundingMode::floor).increments,
            (std::vector<std::int64_t>{3}));
}

TEST(Rounding, CumulativeStrictlyIncreasing) {
  std::mt19937_64 gen(8);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> inc(1 + gen() % 6);
    for (auto& t : inc) t = std::uniform_real_distribution<double>(0, 4)(gen);
    for (auto mode : {RoundingMode::nearest_half_up, RoundingMode::floor, RoundingMode::ceil,
                      RoundingMode::floor_first}) {
      auto r = engage::round_policy(inc, mode);
      std::int64_t sum = 0;
      for (std::size_t i = 0; i < inc.size(); ++i) {
        EXPECT_GE(r.increments[i], 1);
        sum += r.increments[i];
        EXPECT_EQ(r.cumulative[i], sum);
      }
    }
  }
}

TEST(Rounding, ParseModes) {
  EXPECT_EQ(engage::parse_rounding_mode("nearest"), RoundingMode::nearest_half_up);
  EXPECT_EQ(engage::parse_rounding_mode("floor"), RoundingMode::floor);
  EXPECT_EQ(engage::parse_rounding_mode("ceil"), RoundingMode::ceil);
  EXPECT_EQ(engage::parse_rounding_mode("floor-first"), RoundingMode::floor_first);
  EXPECT_EQ(engage::to_string(RoundingMode::floor_first), "floor-first");
  EXPECT_THROW(engage::parse_rounding_mode("banker"), ValidationError);
}

TEST(Policy, Validation) {
  EXPECT_THROW(BadgePolicy::make({}), ValidationError);
  EXPECT_THROW(BadgePolicy::make({1, -1}), ValidationError);
  EXPECT_THROW(BadgePolicy::make({1, INFINITY}), ValidationError);
  EXPECT_THROW(BadgePolicy::make({1, 2}, {"only-one"}), ValidationError);
  EXPECT_EQ(BadgePolicy::make({1, 2}).tier_names, (std::vector<std::string>{"tier1", "tier2"}));
}

// A Uniform[1,10] calculation that uses survival (11 - t)/10 with the truncated
// term (t + 1) t / 20 mixes two different distributions. The rounded answer
// (2, 4, 6) comes out of that literal integrand, not out of Uniform[1,10].
TEST(LiteralU110Fixture, ReproducesTwoFourSix) {
  auto literal = [](double c, double t) { return (t + c) * (11 - t) / 10 + (t + 1) * t / 20; };
  double w = 5.5;
  std::vector<double> backward;
  std::vector<double> values;
  for (int stage = 0; stage < 3; ++stage) {
    const double t = oracle::golden_max([&](double x) { return literal(w, x); }, 1, 10);
    backward.push_back(t);
    w = literal(w, t);
    values.push_back(w);
  }
  EXPECT_NEAR(backward[0], 6.0, 1e-6);
  EXPECT_NEAR(values[0], 157.0 / 20, 1e-9);
  EXPECT_NEAR(backward[1], 3.65, 1e-6);
  EXPECT_NEAR(values[1], 74409.0 / 8000, 1e-9);
  EXPECT_NEAR(backward[2], 2.198875, 1e-6);
  auto r = engage::round_policy(std::vector<double>{backward[2], backward[1], backward[0]},
                                RoundingMode::nearest_half_up);
  EXPECT_EQ(r.increments, (std::vector<std::int64_t>{2, 4, 6}));
}

TEST(LiteralU110Fixture, SelfConsistentUniformDiffers) {
  auto d = MotivationDistribution::uniform(1, 10);
  auto sol = engage::optimize_thresholds(d, 3);
  auto ref = oracle::uniform_design(1, 10, 3);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(sol.policy.increments[i], ref.increments[i], 1e-6);
  EXPECT_NE(engage::round_policy(sol, RoundingMode::nearest_half_up).increments,
            (std::vector<std::int64_t>{2, 4, 6}));
}

}  // namespace
