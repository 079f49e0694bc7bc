#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "engage/motivation.hpp"

namespace engage {

// Tier increments T_1..T_K: increments[i] is the additional work needed for
// tier i+1 once tier i is held. Zero is allowed for evaluation (the tier is
// earned instantly and motivation refreshes once).
struct BadgePolicy {
  std::vector<double> increments;
  std::vector<std::string> tier_names;

  // Validates K >= 1 and finite, nonnegative increments. Tier names default to
  // bronze/silver/gold for K = 3 and tier1..tierK otherwise.
  static BadgePolicy make(std::vector<double> increments,
                          std::vector<std::string> tier_names = {});

  std::size_t tiers() const { return increments.size(); }
};

std::vector<std::string> default_tier_names(std::size_t tiers);

struct StageOptimum {
  double threshold = 0.0;
  double value = 0.0;
  // True when the optimum solves survival/pdf = continuation strictly inside
  // the support.
  bool interior = false;
  // True when the grid + golden-section fallback was used (non-log-concave F).
  bool used_scan = false;
};

struct BadgeDesignSolution {
  BadgePolicy policy;
  // stage_values[0] = E[V]; stage_values[i] = best value with i tiers left.
  std::vector<double> stage_values;
  double optimal_value = 0.0;
  // Per forward tier, whether that threshold is an interior critical point.
  std::vector<bool> interior;
  bool used_scan = false;
};

// (t + continuation) * survival(t) + E[V 1{V < t}]
double stage_value(const MotivationDistribution& dist, double continuation, double t);

StageOptimum optimal_stage_threshold(const MotivationDistribution& dist, double continuation);

BadgeDesignSolution optimize_thresholds(const MotivationDistribution& dist, int tiers);

// Expected activities for an arbitrary policy via the forward closed-form sum
//   sum_j P_{j-1} (T_j S(T_j) + M(T_j)) + P_K E[V],   P_j = prod_{k<=j} S(T_k).
double expected_activities(const MotivationDistribution& dist, const BadgePolicy& policy);

// Same quantity by backward recursion from G_0 = E[V].
double expected_activities_recursive(const MotivationDistribution& dist,
                                     const BadgePolicy& policy);

inline constexpr double kStructureTolerance = 1e-7;

struct PropertyCheck {
  std::string name;
  bool pass = true;
  // Smallest margin observed; empty when the property is vacuous (K = 1).
  std::optional<double> slack;
};

struct StructureReport {
  PropertyCheck monotone_increments;
  PropertyCheck bounded_increments;
  PropertyCheck diminishing_gains;
  // Generalized inverse hazard at 1 / E[V].
  double increment_bound = 0.0;
  std::vector<double> marginal_gains;

  bool all_pass() const {
    return monotone_increments.pass && bounded_increments.pass && diminishing_gains.pass;
  }
};

StructureReport verify_structure(const MotivationDistribution& dist,
                                 const BadgeDesignSolution& solution);

enum class RoundingMode {
  nearest_half_up,
  floor,
  ceil,
  // floor on the first increment, nearest_half_up on the rest
  floor_first,
};

std::string_view to_string(RoundingMode mode);
RoundingMode parse_rounding_mode(std::string_view text);

struct RoundedPolicy {
  std::vector<std::int64_t> increments;
  std::vector<std::int64_t> cumulative;
  RoundingMode mode = RoundingMode::nearest_half_up;
};

RoundedPolicy round_policy(const std::vector<double>& increments, RoundingMode mode);
RoundedPolicy round_policy(const BadgeDesignSolution& solution, RoundingMode mode);

}  // namespace engage
