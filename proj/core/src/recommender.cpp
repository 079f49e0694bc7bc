#include "engage/recommender.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "engage/errors.hpp"

namespace engage {
namespace {

template <typename Items>
void require_unique_ids(const Items& items, const char* what) {
  std::unordered_set<std::string> seen;
  for (const auto& item : items) {
    if (!seen.insert(item.id).second) {
      throw ValidationError(std::string("duplicate ") + what + " id '" + item.id + "'");
    }
  }
}

}  // namespace

std::string_view to_string(Category c) {
  switch (c) {
    case Category::beauty:
      return "beauty";
    case Category::entertainment:
      return "entertainment";
    case Category::food:
      return "food";
    case Category::shopping:
      return "shopping";
  }
  return "food";
}

std::string_view to_string(Activity a) { return a == Activity::explore ? "explore" : "social"; }

std::optional<Category> parse_category(std::string_view text) {
  for (Category c : kAllCategories) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

std::optional<Activity> parse_activity(std::string_view text) {
  for (Activity a : kAllActivities) {
    if (to_string(a) == text) return a;
  }
  return std::nullopt;
}

int affinity(const UserProfile& user, const Business& business) {
  if (!user.desired_categories.contains(business.category)) return 0;
  int count = 0;
  for (Activity a : business.offered_activities) {
    if (user.desired_activities.contains(a)) ++count;
  }
  return count;
}

AffinityMatrix AffinityMatrix::compute(const std::vector<UserProfile>& users,
                                       const std::vector<Business>& businesses) {
  AffinityMatrix m;
  m.users_ = users.size();
  m.businesses_ = businesses.size();
  m.entries_.reserve(m.users_ * m.businesses_);
  for (const auto& u : users) {
    for (const auto& b : businesses) m.entries_.push_back(affinity(u, b));
  }
  return m;
}

std::size_t RecommendationPlan::row_of(std::string_view user_id) const {
  const auto it = std::find(user_ids.begin(), user_ids.end(), user_id);
  if (it == user_ids.end()) {
    throw ValidationError("no plan row for user '" + std::string(user_id) + "'");
  }
  return static_cast<std::size_t>(it - user_ids.begin());
}

lp::LinearProgram build_plan_lp(const std::vector<UserProfile>& users,
                                const std::vector<Business>& businesses, double ratio,
                                const AffinityMatrix& affinities) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw ValidationError("fairness ratio must be in (0, 1]");
  if (users.empty()) throw ValidationError("recommendation LP needs at least one user");
  if (businesses.size() < 2) throw ValidationError("recommendation LP needs at least two businesses");
  if (affinities.users() != users.size() || affinities.businesses() != businesses.size()) {
    throw ValidationError("affinity matrix shape does not match the catalogs");
  }

  const std::size_t nu = users.size();
  const std::size_t nb = businesses.size();
  lp::LinearProgram prog;
  prog.objective.resize(nu * nb);
  for (std::size_t u = 0; u < nu; ++u) {
    for (std::size_t b = 0; b < nb; ++b) {
      prog.objective[u * nb + b] = static_cast<double>(affinities(u, b));
    }
  }

  for (std::size_t u = 0; u < nu; ++u) {
    std::vector<double> row(nu * nb, 0.0);
    std::fill(row.begin() + static_cast<std::ptrdiff_t>(u * nb),
              row.begin() + static_cast<std::ptrdiff_t>((u + 1) * nb), 1.0);
    prog.eq_A.push_back(std::move(row));
    prog.eq_b.push_back(1.0);
  }

  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t other = 0; other < nb; ++other) {
      if (other == b) continue;
      std::vector<double> row(nu * nb, 0.0);
      for (std::size_t u = 0; u < nu; ++u) {
        row[u * nb + b] = ratio;
        row[u * nb + other] = -1.0;
      }
      prog.ub_A.push_back(std::move(row));
      prog.ub_b.push_back(0.0);
    }
  }
  return prog;
}

RecommendationPlan solve_plan(const std::vector<UserProfile>& users,
                              const std::vector<Business>& businesses, const PlanConfig& config) {
  if (!(config.ratio > 0.0 && config.ratio <= 1.0)) {
    throw ValidationError("fairness ratio must be in (0, 1]");
  }
  require_unique_ids(users, "user");
  require_unique_ids(businesses, "business");

  RecommendationPlan plan;
  plan.period_id = config.period_id;
  plan.fairness_ratio_used = config.ratio;
  for (const auto& u : users) plan.user_ids.push_back(u.id);
  for (const auto& b : businesses) plan.business_ids.push_back(b.id);

  const std::size_t nu = users.size();
  const std::size_t nb = businesses.size();
  if (nu > 0 && nb == 0) throw ValidationError("cannot plan recommendations with no businesses");

  const AffinityMatrix alpha = AffinityMatrix::compute(users, businesses);
  plan.probabilities.assign(nu, std::vector<double>(nb, 0.0));

  if (nu > 0 && nb == 1) {
    for (auto& row : plan.probabilities) row[0] = 1.0;
  } else if (nu > 0) {
    const lp::LinearProgram prog = build_plan_lp(users, businesses, config.ratio, alpha);
    const lp::LpSolution sol = lp::solve(prog);
    if (sol.status != lp::Status::optimal) {
      throw InternalError("fairness infeasible: recommendation LP returned " +
                          std::string(lp::to_string(sol.status)));
    }
    for (std::size_t u = 0; u < nu; ++u) {
      for (std::size_t b = 0; b < nb; ++b) {
        plan.probabilities[u][b] = std::clamp(sol.x[u * nb + b], 0.0, 1.0);
      }
    }
  }

  for (std::size_t u = 0; u < nu; ++u) {
    for (std::size_t b = 0; b < nb; ++b) {
      plan.objective += alpha(u, b) * plan.probabilities[u][b];
    }
  }
  plan.audit = fairness_audit(plan);
  if (!plan.audit.pass) {
    throw InternalError("fairness infeasible: solved plan fails its own audit");
  }
  return plan;
}

FairnessAudit fairness_audit(const RecommendationPlan& plan) {
  FairnessAudit audit;
  const std::size_t nb = plan.business_ids.size();
  if (plan.probabilities.empty() || nb == 0) return audit;

  std::vector<double> column(nb, 0.0);
  for (const auto& row : plan.probabilities) {
    if (row.size() != nb) throw ValidationError("plan row width does not match business count");
    for (std::size_t b = 0; b < nb; ++b) column[b] += row[b];
  }
  const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
  audit.min_column_sum = *lo;
  audit.max_column_sum = *hi;
  audit.ratio = *hi > 0.0 ? *lo / *hi : 1.0;
  audit.pass = audit.ratio >= plan.fairness_ratio_used - kFairnessTolerance;
  return audit;
}

std::vector<std::size_t> plackett_luce_order(const std::vector<double>& weights,
                                             const std::function<double()>& next_uniform) {
  std::vector<std::size_t> remaining(weights.size());
  for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;

  std::vector<std::size_t> order;
  order.reserve(weights.size());
  while (!remaining.empty()) {
    double total = 0.0;
    for (std::size_t i : remaining) total += std::max(0.0, weights[i]);

    std::size_t pick = remaining.size() - 1;
    const double u = next_uniform();
    if (total > 0.0) {
      const double target = u * total;
      double acc = 0.0;
      std::size_t last_positive = 0;
      for (std::size_t k = 0; k < remaining.size(); ++k) {
        const double w = std::max(0.0, weights[remaining[k]]);
        if (w <= 0.0) continue;
        last_positive = k;
        acc += w;
        if (target < acc) {
          pick = k;
          break;
        }
        pick = last_positive;
      }
    } else {
      pick = std::min(remaining.size() - 1,
                      static_cast<std::size_t>(u * static_cast<double>(remaining.size())));
    }
    order.push_back(remaining[pick]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return order;
}

}  // namespace engage
