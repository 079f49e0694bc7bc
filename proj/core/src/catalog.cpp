#include "engage/catalog.hpp"

#include <set>

#include "engage/errors.hpp"

namespace engage::io {
namespace {

std::string allowed_list(bool categories) {
  std::string out;
  if (categories) {
    for (Category c : kAllCategories) out += (out.empty() ? "" : ", ") + std::string(to_string(c));
  } else {
    for (Activity a : kAllActivities) out += (out.empty() ? "" : ", ") + std::string(to_string(a));
  }
  return "{" + out + "}";
}

class Collector {
 public:
  explicit Collector(std::string file) : file_(std::move(file)) {}
  void add(std::string path, std::string message) {
    out_.push_back({file_, std::move(path), std::move(message)});
  }
  std::vector<CatalogViolation> take() { return std::move(out_); }

 private:
  std::string file_;
  std::vector<CatalogViolation> out_;
};

void check_string(const Json& obj, const char* key, const std::string& at, Collector& c,
                  bool required = true) {
  if (!obj.contains(key)) {
    if (required) c.add(at + "." + key, "missing required field");
    return;
  }
  if (!obj[key].is_string() || obj[key].get_ref<const std::string&>().empty()) {
    c.add(at + "." + key, "must be a nonempty string");
  }
}

void check_enum_array(const Json& obj, const char* key, const std::string& at, bool categories,
                      bool nonempty, Collector& c) {
  if (!obj.contains(key)) {
    c.add(at + "." + key, "missing required field");
    return;
  }
  const Json& arr = obj[key];
  if (!arr.is_array()) {
    c.add(at + "." + key, "must be an array");
    return;
  }
  if (nonempty && arr.empty()) c.add(at + "." + key, "must not be empty");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = at + "." + key + "[" + std::to_string(i) + "]";
    if (!arr[i].is_string()) {
      c.add(path, "must be a string");
      continue;
    }
    const auto& v = arr[i].get_ref<const std::string&>();
    const bool ok = categories ? parse_category(v).has_value() : parse_activity(v).has_value();
    if (!ok) {
      c.add(path, "'" + v + "' is not one of " + allowed_list(categories));
    } else if (!seen.insert(v).second) {
      c.add(path, "duplicate value '" + v + "'");
    }
  }
}

void check_unique_id(const Json& obj, const std::string& at, std::set<std::string>& ids,
                     const char* what, Collector& c) {
  if (obj.contains("id") && obj["id"].is_string()) {
    const auto& id = obj["id"].get_ref<const std::string&>();
    if (!id.empty() && !ids.insert(id).second) {
      c.add(at + ".id", std::string("duplicate ") + what + " id '" + id + "'");
    }
  }
}

[[noreturn]] void throw_violations(const std::vector<CatalogViolation>& v) {
  std::string msg = "catalog validation failed:";
  for (const auto& x : v) {
    msg += "\n  " + (x.file.empty() ? std::string() : x.file + ": ") + x.path + ": " + x.message;
  }
  throw ValidationError(msg);
}

std::set<Activity> activities_of(const Json& arr) {
  std::set<Activity> out;
  for (const auto& v : arr) out.insert(*parse_activity(v.get<std::string>()));
  return out;
}

lp::Matrix matrix_of(const Json& doc, const char* what) {
  if (!doc.is_array()) throw ValidationError(std::string("LP field ") + what + " must be an array");
  lp::Matrix m;
  for (const auto& row : doc) {
    if (!row.is_array()) throw ValidationError(std::string("LP field ") + what + " rows must be arrays");
    std::vector<double> r;
    for (const auto& v : row) {
      if (!v.is_number()) throw ValidationError(std::string("LP field ") + what + " must be numeric");
      r.push_back(v.get<double>());
    }
    m.push_back(std::move(r));
  }
  return m;
}

std::vector<double> vector_of(const Json& doc, const char* what) {
  if (!doc.is_array()) throw ValidationError(std::string("LP field ") + what + " must be an array");
  std::vector<double> out;
  for (const auto& v : doc) {
    if (!v.is_number()) throw ValidationError(std::string("LP field ") + what + " must be numeric");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

std::vector<CatalogViolation> validate_businesses(const Json& doc, const std::string& file) {
  Collector c(file);
  if (!doc.is_array()) {
    c.add("$", "businesses file must be a JSON array");
    return c.take();
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string at = "$[" + std::to_string(i) + "]";
    const Json& b = doc[i];
    if (!b.is_object()) {
      c.add(at, "must be an object");
      continue;
    }
    check_string(b, "id", at, c);
    check_unique_id(b, at, ids, "business", c);
    check_string(b, "name", at, c);
    if (!b.contains("category")) {
      c.add(at + ".category", "missing required field");
    } else if (!b["category"].is_string() ||
               !parse_category(b["category"].get_ref<const std::string&>())) {
      c.add(at + ".category", b["category"].dump() + " is not one of " + allowed_list(true));
    }
    check_enum_array(b, "offered_activities", at, false, true, c);
    if (b.contains("links")) {
      if (!b["links"].is_object()) {
        c.add(at + ".links", "must be an object of strings");
      } else {
        for (auto it = b["links"].begin(); it != b["links"].end(); ++it) {
          if (!it.value().is_string()) c.add(at + ".links." + it.key(), "must be a string");
        }
      }
    }
  }
  return c.take();
}

std::vector<CatalogViolation> validate_users(const Json& doc, const std::string& file) {
  Collector c(file);
  if (!doc.is_array()) {
    c.add("$", "users file must be a JSON array");
    return c.take();
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string at = "$[" + std::to_string(i) + "]";
    const Json& u = doc[i];
    if (!u.is_object()) {
      c.add(at, "must be an object");
      continue;
    }
    check_string(u, "id", at, c);
    check_unique_id(u, at, ids, "user", c);
    check_enum_array(u, "desired_categories", at, true, false, c);
    check_enum_array(u, "desired_activities", at, false, false, c);
  }
  return c.take();
}

std::vector<CatalogViolation> validate_catalogs(const std::filesystem::path& businesses_path,
                                                const std::filesystem::path& users_path) {
  auto out = validate_businesses(read_json_file(businesses_path), businesses_path.string());
  auto users = validate_users(read_json_file(users_path), users_path.string());
  out.insert(out.end(), users.begin(), users.end());
  return out;
}

Json violations_to_json(const std::vector<CatalogViolation>& violations) {
  Json arr = Json::array();
  for (const auto& v : violations) {
    arr.push_back({{"file", v.file}, {"path", v.path}, {"message", v.message}});
  }
  return Json{{"valid", violations.empty()}, {"violations", arr}};
}

std::vector<Business> businesses_from_json(const Json& doc, const std::string& file) {
  const auto violations = validate_businesses(doc, file);
  if (!violations.empty()) throw_violations(violations);
  std::vector<Business> out;
  for (const auto& b : doc) {
    Business biz;
    biz.id = b["id"].get<std::string>();
    biz.name = b["name"].get<std::string>();
    biz.category = *parse_category(b["category"].get<std::string>());
    biz.offered_activities = activities_of(b["offered_activities"]);
    if (b.contains("links")) {
      for (auto it = b["links"].begin(); it != b["links"].end(); ++it) {
        biz.links[it.key()] = it.value().get<std::string>();
      }
    }
    out.push_back(std::move(biz));
  }
  return out;
}

std::vector<UserProfile> users_from_json(const Json& doc, const std::string& file) {
  const auto violations = validate_users(doc, file);
  if (!violations.empty()) throw_violations(violations);
  std::vector<UserProfile> out;
  for (const auto& u : doc) {
    UserProfile user;
    user.id = u["id"].get<std::string>();
    for (const auto& c : u["desired_categories"]) {
      user.desired_categories.insert(*parse_category(c.get<std::string>()));
    }
    user.desired_activities = activities_of(u["desired_activities"]);
    out.push_back(std::move(user));
  }
  return out;
}

std::vector<Business> load_businesses(const std::filesystem::path& path) {
  return businesses_from_json(read_json_file(path), path.string());
}

std::vector<UserProfile> load_users(const std::filesystem::path& path) {
  return users_from_json(read_json_file(path), path.string());
}

Json audit_to_json(const FairnessAudit& audit) {
  return Json{{"min", audit.min_column_sum},
              {"max", audit.max_column_sum},
              {"ratio", audit.ratio},
              {"pass", audit.pass}};
}

Json plan_to_json(const RecommendationPlan& plan) {
  Json users = Json::array();
  for (std::size_t u = 0; u < plan.user_ids.size(); ++u) {
    Json probs = Json::object();
    for (std::size_t b = 0; b < plan.business_ids.size(); ++b) {
      probs[plan.business_ids[b]] = plan.probabilities[u][b];
    }
    users.push_back({{"id", plan.user_ids[u]}, {"probabilities", probs}});
  }
  return Json{{"period_id", plan.period_id},
              {"ratio", plan.fairness_ratio_used},
              {"businesses", plan.business_ids},
              {"objective", plan.objective},
              {"users", users},
              {"audit", audit_to_json(plan.audit)}};
}

RecommendationPlan plan_from_json(const Json& doc) {
  try {
    RecommendationPlan plan;
    plan.period_id = doc.at("period_id").get<std::string>();
    plan.fairness_ratio_used = doc.at("ratio").get<double>();
    if (!(plan.fairness_ratio_used > 0.0 && plan.fairness_ratio_used <= 1.0)) {
      throw ValidationError("plan ratio must be in (0, 1]");
    }
    plan.objective = doc.value("objective", 0.0);
    const Json& users = doc.at("users");
    if (doc.contains("businesses")) {
      plan.business_ids = doc["businesses"].get<std::vector<std::string>>();
    } else if (!users.empty()) {
      for (auto it = users[0].at("probabilities").begin();
           it != users[0].at("probabilities").end(); ++it) {
        plan.business_ids.push_back(it.key());
      }
    }
    for (const auto& u : users) {
      plan.user_ids.push_back(u.at("id").get<std::string>());
      const Json& probs = u.at("probabilities");
      std::vector<double> row;
      for (const auto& b : plan.business_ids) {
        const double p = probs.at(b).get<double>();
        if (!(p >= 0.0 && p <= 1.0)) {
          throw ValidationError("plan probability out of [0, 1] for user '" + plan.user_ids.back() +
                                "'");
        }
        row.push_back(p);
      }
      if (probs.size() != plan.business_ids.size()) {
        throw ValidationError("plan row for user '" + plan.user_ids.back() +
                              "' has unexpected business ids");
      }
      plan.probabilities.push_back(std::move(row));
    }
    plan.audit = fairness_audit(plan);
    return plan;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed plan: ") + e.what());
  }
}

lp::LinearProgram lp_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("maximize")) {
    throw ValidationError("LP JSON needs an object with a 'maximize' array");
  }
  lp::LinearProgram prog;
  prog.objective = vector_of(doc["maximize"], "maximize");
  for (const char* block : {"eq", "ub"}) {
    if (!doc.contains(block)) continue;
    const Json& b = doc[block];
    if (!b.is_object() || !b.contains("A") || !b.contains("b")) {
      throw ValidationError(std::string("LP field ") + block + " needs A and b");
    }
    auto a = matrix_of(b["A"], block);
    auto rhs = vector_of(b["b"], block);
    if (std::string(block) == "eq") {
      prog.eq_A = std::move(a);
      prog.eq_b = std::move(rhs);
    } else {
      prog.ub_A = std::move(a);
      prog.ub_b = std::move(rhs);
    }
  }
  if (doc.contains("lower")) prog.lower_bounds = vector_of(doc["lower"], "lower");
  prog.validate();
  return prog;
}

Json lp_solution_to_json(const lp::LpSolution& solution) {
  Json out{{"status", std::string(lp::to_string(solution.status))},
           {"iterations", solution.iterations}};
  if (solution.status == lp::Status::optimal) {
    out["x"] = solution.x;
    out["objective"] = solution.objective_value;
  }
  return out;
}

}  // namespace engage::io
