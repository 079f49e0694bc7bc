#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "engage/lp.hpp"
#include "engage/rng.hpp"

namespace engage {

enum class Category { beauty, entertainment, food, shopping };
enum class Activity { explore, social };

inline constexpr Category kAllCategories[] = {Category::beauty, Category::entertainment,
                                              Category::food, Category::shopping};
inline constexpr Activity kAllActivities[] = {Activity::explore, Activity::social};

std::string_view to_string(Category c);
std::string_view to_string(Activity a);
std::optional<Category> parse_category(std::string_view text);
std::optional<Activity> parse_activity(std::string_view text);

struct Business {
  std::string id;
  std::string name;
  Category category = Category::food;
  std::set<Activity> offered_activities;
  std::map<std::string, std::string> links;
};

struct UserProfile {
  std::string id;
  std::set<Category> desired_categories;
  std::set<Activity> desired_activities;
};

// |offered(b) ∩ desired(u)| if the business category is wanted, else 0.
int affinity(const UserProfile& user, const Business& business);

class AffinityMatrix {
 public:
  static AffinityMatrix compute(const std::vector<UserProfile>& users,
                                const std::vector<Business>& businesses);

  int operator()(std::size_t user, std::size_t business) const {
    return entries_[user * businesses_ + business];
  }
  std::size_t users() const { return users_; }
  std::size_t businesses() const { return businesses_; }

 private:
  std::size_t users_ = 0;
  std::size_t businesses_ = 0;
  std::vector<int> entries_;
};

inline constexpr double kDefaultFairnessRatio = 0.8;
inline constexpr double kFairnessTolerance = 1e-8;

struct FairnessAudit {
  double min_column_sum = 0.0;
  double max_column_sum = 0.0;
  double ratio = 1.0;
  bool pass = true;
};

struct RecommendationPlan {
  std::string period_id;
  std::vector<std::string> user_ids;
  std::vector<std::string> business_ids;
  // probabilities[u][b]: chance business b is shown first to user u.
  std::vector<std::vector<double>> probabilities;
  double fairness_ratio_used = kDefaultFairnessRatio;
  double objective = 0.0;
  FairnessAudit audit;

  // Throws ValidationError("no plan row ...") for unknown users.
  std::size_t row_of(std::string_view user_id) const;
};

struct PlanConfig {
  double ratio = kDefaultFairnessRatio;
  std::string period_id;
};

// Variable (u, b) sits at column u * B + b. One equality per user, one
// inequality ratio * s_b - s_b' <= 0 per ordered pair b != b'.
lp::LinearProgram build_plan_lp(const std::vector<UserProfile>& users,
                                const std::vector<Business>& businesses, double ratio,
                                const AffinityMatrix& affinities);

RecommendationPlan solve_plan(const std::vector<UserProfile>& users,
                              const std::vector<Business>& businesses, const PlanConfig& config);

// Recomputes column sums from the probabilities. An empty plan passes with ratio 1.
FairnessAudit fairness_audit(const RecommendationPlan& plan);

// Successive renormalized draws without replacement (Plackett-Luce) from a
// weight row; `next_uniform` yields values in [0, 1). Zero-weight entries are
// ordered uniformly at random once the positive mass is used up.
std::vector<std::size_t> plackett_luce_order(const std::vector<double>& weights,
                                             const std::function<double()>& next_uniform);

template <std::uniform_random_bit_generator Gen>
std::vector<std::string> sample_carousel(const RecommendationPlan& plan, std::string_view user_id,
                                         Gen& gen) {
  const auto& row = plan.probabilities[plan.row_of(user_id)];
  std::vector<std::string> out;
  for (std::size_t b : plackett_luce_order(row, [&] { return unit_uniform(gen); })) {
    out.push_back(plan.business_ids[b]);
  }
  return out;
}

}  // namespace engage
