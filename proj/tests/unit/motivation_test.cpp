#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "engage/errors.hpp"
#include "engage/motivation.hpp"
#include "oracles.hpp"

namespace {

using engage::MotivationDistribution;
using engage::ValidationError;

MotivationDistribution mixture() {
  return MotivationDistribution::from_family(std::make_shared<engage::UniformMixtureFamily>(
      std::vector<engage::UniformMixtureFamily::Component>{{0.5, 0.0, 1.0}, {0.5, 4.0, 5.0}}));
}

std::vector<MotivationDistribution> all_fixtures() {
  return {MotivationDistribution::uniform(0, 5), MotivationDistribution::uniform(1, 10),
          MotivationDistribution::exponential(1), MotivationDistribution::exponential(3.5),
          mixture()};
}

TEST(Motivation, PdfExamples) {
  auto u = MotivationDistribution::uniform(0, 5);
  EXPECT_DOUBLE_EQ(u.pdf(2.5), 0.2);
  EXPECT_EQ(u.pdf(7), 0.0);
  EXPECT_EQ(u.pdf(-1), 0.0);
  EXPECT_DOUBLE_EQ(MotivationDistribution::exponential(1).pdf(0), 1.0);
  EXPECT_DOUBLE_EQ(MotivationDistribution::exponential(2).pdf(1), 2 * std::exp(-2.0));
}

TEST(Motivation, SurvivalExamples) {
  auto u = MotivationDistribution::uniform(0, 5);
  EXPECT_DOUBLE_EQ(u.survival(2.5), 0.5);
  EXPECT_DOUBLE_EQ(u.survival(15.0 / 8), 5.0 / 8);
  EXPECT_EQ(MotivationDistribution::exponential(2).survival(0), 1.0);
}

TEST(Motivation, HazardExamples) {
  auto u = MotivationDistribution::uniform(0, 5);
  EXPECT_NEAR(u.hazard(2.5), 0.4, 1e-15);
  EXPECT_NEAR(u.inverse_hazard(1 / 2.5), 2.5, 1e-9);
  auto e = MotivationDistribution::exponential(3);
  for (double t : {0.0, 0.1, 1.0, 4.0}) EXPECT_NEAR(e.hazard(t), 3.0, 1e-12);
}

TEST(Motivation, HazardRoundTrip) {
  auto u = MotivationDistribution::uniform(1, 4);
  for (double t = 1.0; t < 3.99; t += 0.25) EXPECT_NEAR(u.inverse_hazard(u.hazard(t)), t, 1e-9);
}

TEST(Motivation, HazardErrors) {
  auto u = MotivationDistribution::uniform(0, 5);
  EXPECT_THROW(u.hazard(5.0), ValidationError);
  EXPECT_THROW(u.hazard(6.0), ValidationError);
  // hazard on [0, 5) ranges over [0.2, inf)
  EXPECT_THROW(u.inverse_hazard(0.1), ValidationError);
  EXPECT_THROW(MotivationDistribution::exponential(3).inverse_hazard(2.0), ValidationError);
  try {
    u.hazard(5.0);
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("hazard undefined"), std::string::npos);
  }
  try {
    u.inverse_hazard(0.1);
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("no preimage"), std::string::npos);
  }
}

TEST(Motivation, ExponentialFlatHazardResolvesToSmallest) {
  EXPECT_EQ(MotivationDistribution::exponential(3).inverse_hazard(3.0), 0.0);
}

TEST(Motivation, HazardQuantileClampsToSupport) {
  // uniform(3, 5): hazard at lo is 0.5 > 1/E[V] = 0.25, so no strict preimage
  auto u = MotivationDistribution::uniform(3, 5);
  EXPECT_THROW(u.inverse_hazard(0.25), ValidationError);
  EXPECT_EQ(u.hazard_quantile(0.25), 3.0);
  EXPECT_NEAR(MotivationDistribution::uniform(0, 5).hazard_quantile(0.4), 2.5, 1e-12);
}

TEST(Motivation, MeanAndTruncatedMean) {
  auto u = MotivationDistribution::uniform(0, 5);
  EXPECT_DOUBLE_EQ(u.truncated_mean_below(2.5), 0.625);
  EXPECT_EQ(u.truncated_mean_below(0), 0.0);
  EXPECT_DOUBLE_EQ(u.mean(), 2.5);
  EXPECT_DOUBLE_EQ(u.truncated_mean_below(100), 2.5);
  auto e = MotivationDistribution::exponential(2);
  EXPECT_DOUBLE_EQ(e.mean(), 0.5);
  EXPECT_NEAR(e.truncated_mean_below(1e6), 0.5, 1e-15);
  // 1/l - (t + 1/l) e^{-lt}
  EXPECT_NEAR(e.truncated_mean_below(1.0), 0.5 - 1.5 * std::exp(-2.0), 1e-15);
}

TEST(Motivation, SampleMomentsAndDeterminism) {
  auto u = MotivationDistribution::uniform(0, 5);
  engage::Rng gen(42);
  const int n = 1'000'000;
  double sum = 0;
  int below = 0;
  for (int i = 0; i < n; ++i) {
    double v = u.sample(gen);
    sum += v;
    below += v < 2.5;
  }
  const double se = std::sqrt(25.0 / 12.0 / n);
  EXPECT_NEAR(se, 0.00144, 1e-5);
  EXPECT_NEAR(sum / n, 2.5, 3 * se);
  EXPECT_NEAR(static_cast<double>(below) / n, 0.5, 3 * std::sqrt(0.25 / n));

  engage::Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(u.sample(a), u.sample(b));
}

TEST(Motivation, KolmogorovSmirnov) {
  for (const auto& d : all_fixtures()) {
    engage::SplitMix64 gen(7);
    std::vector<double> xs(100'000);
    for (auto& x : xs) x = d.sample(gen);
    const double ks = oracle::ks_statistic(xs, [&](double t) { return d.cdf(t); });
    EXPECT_LT(ks, oracle::ks_critical_001(xs.size())) << d.describe();
  }
}

TEST(Motivation, LogConcavity) {
  EXPECT_TRUE(engage::check_log_concavity(MotivationDistribution::uniform(0, 5)).is_log_concave);
  EXPECT_TRUE(MotivationDistribution::uniform(0, 5).log_concave());
  auto e = engage::check_log_concavity(MotivationDistribution::exponential(1));
  EXPECT_TRUE(e.is_log_concave);
  EXPECT_LE(e.max_violation, engage::kLogConcavityTolerance);
  EXPECT_EQ(e.grid.size(), 1024u);

  auto m = engage::check_log_concavity(mixture());
  EXPECT_FALSE(m.is_log_concave);
  EXPECT_GT(m.max_violation, engage::kLogConcavityTolerance);
  EXPECT_FALSE(m.skipped.empty());
  for (double t : m.skipped) {
    EXPECT_GT(t, 1.0);
    EXPECT_LT(t, 4.0);
  }
  EXPECT_FALSE(mixture().log_concave());
}

TEST(Motivation, LogConcavityGridTooSmall) {
  EXPECT_THROW(engage::check_log_concavity(MotivationDistribution::uniform(0, 5), 2),
               ValidationError);
}

TEST(Motivation, SurvivalPlusCdfIsOne) {
  for (const auto& d : all_fixtures()) {
    for (double t = -1; t < 12; t += 0.01) {
      EXPECT_NEAR(d.survival(t) + d.cdf(t), 1.0, 1e-12) << d.describe() << " t=" << t;
    }
  }
}

TEST(Motivation, TruncatedMeanMonotoneAndBounded) {
  for (const auto& d : all_fixtures()) {
    double prev = 0;
    for (double t = 0; t < 12; t += 0.01) {
      double m = d.truncated_mean_below(t);
      EXPECT_GE(m, prev - 1e-15);
      EXPECT_LE(m, d.mean() + 1e-12);
      prev = m;
    }
  }
}

TEST(Motivation, HazardNondecreasingForLogConcave) {
  for (const auto& d : all_fixtures()) {
    if (!d.log_concave()) continue;
    const double hi = std::min(d.effective_max(), 12.0);
    double prev = 0;
    for (double t = d.support_min(); t < hi * 0.999; t += hi / 997) {
      double h = d.hazard(t);
      EXPECT_GE(h, prev - 1e-9) << d.describe();
      prev = h;
    }
  }
}

TEST(Motivation, NewBetterThanUsed) {
  for (const auto& d : all_fixtures()) {
    for (double t = 0; t < std::min(d.effective_max(), 12.0); t += 0.05) {
      const double s = d.survival(t);
      if (s < 1e-6) continue;  // mean - M(t) cancels in the far tail
      const double conditional = (d.mean() - d.truncated_mean_below(t)) / s;
      if (d.log_concave()) EXPECT_LE(conditional, t + d.mean() + 1e-9) << d.describe();
    }
  }
}

TEST(Motivation, ParseLiterals) {
  auto u = MotivationDistribution::parse("uniform:0,5");
  EXPECT_EQ(u.support_min(), 0.0);
  EXPECT_EQ(u.support_max(), 5.0);
  EXPECT_EQ(u.describe(), "uniform:0,5");
  auto e = MotivationDistribution::parse("exponential:1.5");
  EXPECT_DOUBLE_EQ(e.mean(), 1 / 1.5);
  EXPECT_TRUE(std::isinf(e.support_max()));
  for (const char* bad : {"uniform:0, 5", "uniform:5,0", "uniform:-1,2", "uniform:0", "normal:1",
                          "exponential:0", "exponential:-2", "exponential:abc", "", "uniform:1,1"}) {
    EXPECT_THROW(MotivationDistribution::parse(bad), ValidationError) << bad;
  }
}

TEST(Motivation, ConstructorValidation) {
  EXPECT_THROW(MotivationDistribution::uniform(-1, 2), ValidationError);
  EXPECT_THROW(MotivationDistribution::uniform(3, 3), ValidationError);
  EXPECT_THROW(MotivationDistribution::exponential(0), ValidationError);
  EXPECT_THROW(MotivationDistribution::exponential(std::nan("")), ValidationError);
}

// Claims a density of 2 on [0, 1]: integrates to 2, so it must be rejected.
class BrokenFamily final : public engage::MotivationFamily {
 public:
  std::string describe() const override { return "broken"; }
  double pdf(double t) const override { return t >= 0 && t <= 1 ? 2.0 : 0.0; }
  double cdf(double t) const override { return std::clamp(t, 0.0, 1.0); }
  double mean() const override { return 0.5; }
  double truncated_mean_below(double t) const override {
    double c = std::clamp(t, 0.0, 1.0);
    return c * c / 2;
  }
  double quantile(double p) const override { return p; }
  double support_min() const override { return 0; }
  double support_max() const override { return 1; }
};

TEST(Motivation, ExtensionNormalizationChecked) {
  EXPECT_THROW(MotivationDistribution::from_family(std::make_shared<BrokenFamily>()),
               ValidationError);
  EXPECT_NEAR(engage::integrate_density(BrokenFamily{}), 2.0, 1e-9);
  EXPECT_NEAR(engage::integrate_density(mixture().family()), 1.0, 1e-9);
}

TEST(Motivation, MixtureFunctionals) {
  auto m = mixture();
  EXPECT_DOUBLE_EQ(m.mean(), 2.5);
  EXPECT_DOUBLE_EQ(m.pdf(0.5), 0.5);
  EXPECT_EQ(m.pdf(2.0), 0.0);
  EXPECT_DOUBLE_EQ(m.cdf(2.0), 0.5);
  EXPECT_NEAR(m.truncated_mean_below(1.0), 0.25, 1e-15);
  EXPECT_NEAR(m.quantile(0.75), 4.5, 1e-9);
}

}  // namespace
