#include "engage/badge_design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "engage/errors.hpp"

namespace engage {
namespace {

constexpr int kScanGrid = 4096;
constexpr double kInvPhi = 0.6180339887498948482;

bool near_tie(double candidate, double best) {
  return candidate >= best - 1e-12 * std::max(1.0, std::abs(best));
}

double golden_section_max(const MotivationDistribution& dist, double continuation, double a,
                          double b) {
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = stage_value(dist, continuation, x1);
  double f2 = stage_value(dist, continuation, x2);
  for (int iter = 0; iter < 200 && b - a > 1e-13 * std::max(1.0, b); ++iter) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = stage_value(dist, continuation, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = stage_value(dist, continuation, x2);
    }
  }
  return 0.5 * (a + b);
}

StageOptimum scan_stage(const MotivationDistribution& dist, double continuation) {
  const double lo = dist.support_min();
  const double hi = dist.effective_max();
  const double step = (hi - lo) / kScanGrid;

  std::size_t best = 0;
  std::vector<double> values(kScanGrid + 1);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double t = (i == kScanGrid) ? hi : lo + step * static_cast<double>(i);
    values[i] = stage_value(dist, continuation, t);
    if (values[i] > values[best]) best = i;
  }
  // Smallest grid maximizer.
  for (std::size_t i = 0; i < best; ++i) {
    if (near_tie(values[i], values[best])) {
      best = i;
      break;
    }
  }

  StageOptimum out;
  out.used_scan = true;
  out.threshold = (best == kScanGrid) ? hi : lo + step * static_cast<double>(best);
  out.value = values[best];

  const double a = best == 0 ? lo : lo + step * static_cast<double>(best - 1);
  const double b = best == kScanGrid ? hi : lo + step * static_cast<double>(best + 1);
  const double refined = golden_section_max(dist, continuation, a, b);
  const double refined_value = stage_value(dist, continuation, refined);
  if (refined_value > out.value && !near_tie(out.value, refined_value)) {
    out.threshold = refined;
    out.value = refined_value;
  }
  out.interior = out.threshold > lo && out.threshold < hi;
  return out;
}

}  // namespace

std::vector<std::string> default_tier_names(std::size_t tiers) {
  if (tiers == 3) return {"bronze", "silver", "gold"};
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= tiers; ++i) names.push_back("tier" + std::to_string(i));
  return names;
}

BadgePolicy BadgePolicy::make(std::vector<double> increments, std::vector<std::string> tier_names) {
  if (increments.empty()) throw ValidationError("badge policy needs at least one tier");
  for (double t : increments) {
    if (!std::isfinite(t) || t < 0.0) {
      throw ValidationError("badge increments must be finite and nonnegative");
    }
  }
  if (tier_names.empty()) tier_names = default_tier_names(increments.size());
  if (tier_names.size() != increments.size()) {
    throw ValidationError("tier name count does not match increment count");
  }
  return BadgePolicy{std::move(increments), std::move(tier_names)};
}

double stage_value(const MotivationDistribution& dist, double continuation, double t) {
  if (!(t >= 0.0) || !(continuation >= 0.0) || !std::isfinite(continuation)) {
    throw ValidationError("invalid stage input");
  }
  if (std::isinf(t)) return dist.mean();
  return (t + continuation) * dist.survival(t) + dist.truncated_mean_below(t);
}

StageOptimum optimal_stage_threshold(const MotivationDistribution& dist, double continuation) {
  if (!std::isfinite(continuation)) throw ValidationError("continuation value must be finite");
  if (continuation < 0.0) throw ValidationError("invalid stage input");
  if (!dist.log_concave()) return scan_stage(dist, continuation);

  const double lo = dist.support_min();
  const double hi = dist.effective_max();
  // d/dt stage_value; changes sign at most once (+ to -) under log-concavity.
  const auto slope = [&](double t) {
    return dist.survival(t) - continuation * dist.pdf(t);
  };

  StageOptimum out;
  const double at_lo = slope(lo);
  const double scale = std::max({1.0, dist.survival(lo), continuation * dist.pdf(lo)});
  if (at_lo <= 1e-12 * scale) {
    out.threshold = lo;
  } else if (slope(hi) >= 0.0) {
    out.threshold = hi;
  } else {
    double a = lo;
    double b = hi;
    for (int iter = 0; iter < 200 && b - a > 1e-14 * std::max(1.0, b); ++iter) {
      const double m = 0.5 * (a + b);
      if (slope(m) > 0.0) {
        a = m;
      } else {
        b = m;
      }
    }
    out.threshold = 0.5 * (a + b);
    out.interior = true;
  }
  out.value = stage_value(dist, continuation, out.threshold);

  // Smallest maximizer on flat objectives.
  if (out.threshold > lo) {
    const double at_min = stage_value(dist, continuation, lo);
    if (near_tie(at_min, out.value)) {
      out.threshold = lo;
      out.value = at_min;
      out.interior = false;
    }
  }
  return out;
}

BadgeDesignSolution optimize_thresholds(const MotivationDistribution& dist, int tiers) {
  if (tiers <= 0) throw ValidationError("tier count must be at least 1");
  const auto k = static_cast<std::size_t>(tiers);

  BadgeDesignSolution solution;
  solution.stage_values.reserve(k + 1);
  solution.stage_values.push_back(dist.mean());

  // Stage i has i tiers remaining; its threshold is forward tier K - i + 1.
  std::vector<double> increments(k);
  std::vector<bool> interior(k);
  for (std::size_t stage = 1; stage <= k; ++stage) {
    const StageOptimum opt = optimal_stage_threshold(dist, solution.stage_values.back());
    increments[k - stage] = opt.threshold;
    interior[k - stage] = opt.interior;
    solution.used_scan = solution.used_scan || opt.used_scan;
    solution.stage_values.push_back(opt.value);
  }
  solution.policy = BadgePolicy::make(std::move(increments));
  solution.interior = std::move(interior);
  solution.optimal_value = solution.stage_values.back();
  return solution;
}

double expected_activities(const MotivationDistribution& dist, const BadgePolicy& policy) {
  double reach = 1.0;
  double total = 0.0;
  for (double t : policy.increments) {
    const double s = dist.survival(t);
    total += reach * (t * s + dist.truncated_mean_below(t));
    reach *= s;
  }
  return total + reach * dist.mean();
}

double expected_activities_recursive(const MotivationDistribution& dist,
                                     const BadgePolicy& policy) {
  double value = dist.mean();
  for (auto it = policy.increments.rbegin(); it != policy.increments.rend(); ++it) {
    value = stage_value(dist, value, *it);
  }
  return value;
}

StructureReport verify_structure(const MotivationDistribution& dist,
                                 const BadgeDesignSolution& solution) {
  const auto& inc = solution.policy.increments;
  const auto& w = solution.stage_values;

  StructureReport report;
  report.monotone_increments.name = "monotone_increments";
  report.bounded_increments.name = "bounded_increments";
  report.diminishing_gains.name = "diminishing_gains";

  for (std::size_t i = 0; i + 1 < inc.size(); ++i) {
    const double margin = inc[i + 1] - inc[i];
    auto& slack = report.monotone_increments.slack;
    slack = slack ? std::min(*slack, margin) : margin;
  }

  report.increment_bound = dist.hazard_quantile(1.0 / dist.mean());
  for (double t : inc) {
    const double margin = report.increment_bound - t;
    auto& slack = report.bounded_increments.slack;
    slack = slack ? std::min(*slack, margin) : margin;
  }

  for (std::size_t i = 1; i < w.size(); ++i) report.marginal_gains.push_back(w[i] - w[i - 1]);
  for (std::size_t i = 0; i + 1 < report.marginal_gains.size(); ++i) {
    const double margin = report.marginal_gains[i] - report.marginal_gains[i + 1];
    auto& slack = report.diminishing_gains.slack;
    slack = slack ? std::min(*slack, margin) : margin;
  }

  for (auto* check : {&report.monotone_increments, &report.bounded_increments,
                      &report.diminishing_gains}) {
    check->pass = !check->slack || *check->slack >= -kStructureTolerance;
  }
  return report;
}

std::string_view to_string(RoundingMode mode) {
  switch (mode) {
    case RoundingMode::nearest_half_up:
      return "nearest";
    case RoundingMode::floor:
      return "floor";
    case RoundingMode::ceil:
      return "ceil";
    case RoundingMode::floor_first:
      return "floor-first";
  }
  return "nearest";
}

RoundingMode parse_rounding_mode(std::string_view text) {
  if (text == "nearest" || text == "nearest_half_up") return RoundingMode::nearest_half_up;
  if (text == "floor") return RoundingMode::floor;
  if (text == "ceil") return RoundingMode::ceil;
  if (text == "floor-first" || text == "floor_first") return RoundingMode::floor_first;
  throw ValidationError("unknown rounding mode '" + std::string(text) +
                        "' (expected nearest, floor, ceil or floor-first)");
}

RoundedPolicy round_policy(const std::vector<double>& increments, RoundingMode mode) {
  RoundedPolicy out;
  out.mode = mode;
  std::int64_t running = 0;
  for (std::size_t i = 0; i < increments.size(); ++i) {
    double x = increments[i];
    if (!std::isfinite(x) || x < 0.0) throw ValidationError("cannot round a non-finite increment");
    // solver output sits within ~1e-14 of exact halves and integers; snap so
    // 2.5 - eps still rounds half-up
    if (std::abs(2.0 * x - std::round(2.0 * x)) < 2e-9) x = std::round(2.0 * x) / 2.0;

    RoundingMode effective = mode;
    if (mode == RoundingMode::floor_first) {
      effective = i == 0 ? RoundingMode::floor : RoundingMode::nearest_half_up;
    }
    double r = 0.0;
    switch (effective) {
      case RoundingMode::floor:
        r = std::floor(x);
        break;
      case RoundingMode::ceil:
        r = std::ceil(x);
        break;
      default:
        r = std::floor(x + 0.5);
        break;
    }
    const auto step = std::max<std::int64_t>(1, static_cast<std::int64_t>(r));
    running += step;
    out.increments.push_back(step);
    out.cumulative.push_back(running);
  }
  return out;
}

RoundedPolicy round_policy(const BadgeDesignSolution& solution, RoundingMode mode) {
  return round_policy(solution.policy.increments, mode);
}

}  // namespace engage
