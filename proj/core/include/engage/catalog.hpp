#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "engage/json_io.hpp"
#include "engage/recommender.hpp"

namespace engage::io {

struct CatalogViolation {
  std::string file;
  std::string path;  // JSON path, e.g. $[3].category
  std::string message;
};

// Schema conformance, id uniqueness and enum membership. Every problem is
// reported; nothing stops at the first one.
std::vector<CatalogViolation> validate_businesses(const Json& doc, const std::string& file = {});
std::vector<CatalogViolation> validate_users(const Json& doc, const std::string& file = {});

// Throws ValidationError for unreadable or non-JSON files.
std::vector<CatalogViolation> validate_catalogs(const std::filesystem::path& businesses_path,
                                                const std::filesystem::path& users_path);

Json violations_to_json(const std::vector<CatalogViolation>& violations);

// Parse after validation; throws ValidationError listing every violation.
std::vector<Business> businesses_from_json(const Json& doc, const std::string& file = {});
std::vector<UserProfile> users_from_json(const Json& doc, const std::string& file = {});
std::vector<Business> load_businesses(const std::filesystem::path& path);
std::vector<UserProfile> load_users(const std::filesystem::path& path);

// plan.json: {audit, businesses, objective, period_id, ratio, users:[{id, probabilities}]}
Json plan_to_json(const RecommendationPlan& plan);
RecommendationPlan plan_from_json(const Json& doc);
Json audit_to_json(const FairnessAudit& audit);

// LP debug format: {maximize:[...], eq:{A,b}, ub:{A,b}, lower?:[...]}
lp::LinearProgram lp_from_json(const Json& doc);
Json lp_solution_to_json(const lp::LpSolution& solution);

}  // namespace engage::io
