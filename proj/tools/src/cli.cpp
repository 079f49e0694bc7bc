#include "engage_cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "engage/badge_design.hpp"
#include "engage/badge_simulator.hpp"
#include "engage/catalog.hpp"
#include "engage/errors.hpp"
#include "engage/json_io.hpp"
#include "engage/lp.hpp"
#include "engage/motivation.hpp"
#include "engage/recommender.hpp"
#include "engage/reporting.hpp"

namespace engage::cli {
namespace {

using io::Json;

template <typename T>
std::vector<T> parse_csv(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T value{};
    if (item.empty() || !(is >> value) || !is.eof()) {
      throw ValidationError(std::string("bad ") + what + " list '" + text + "'");
    }
    out.push_back(value);
  }
  if (out.empty()) throw ValidationError(std::string("empty ") + what + " list");
  return out;
}

void emit(const Json& payload, const std::string& out_path, std::ostream& out) {
  const std::string text = io::dump_canonical(payload);
  if (out_path.empty()) {
    out << text;
  } else {
    io::write_text_file(out_path, text);
  }
}

Json optional_slack(const PropertyCheck& check) {
  return check.slack ? Json(*check.slack) : Json(nullptr);
}

Json optimize_payload(const MotivationDistribution& dist, int tiers, RoundingMode mode) {
  const BadgeDesignSolution solution = optimize_thresholds(dist, tiers);
  const StructureReport structure = verify_structure(dist, solution);
  const RoundedPolicy rounded = round_policy(solution, mode);

  std::vector<double> rounded_real(rounded.increments.begin(), rounded.increments.end());
  const BadgePolicy rounded_policy = BadgePolicy::make(rounded_real);

  return Json{
      {"distribution", dist.describe()},
      {"tiers", tiers},
      {"tier_names", solution.policy.tier_names},
      {"increments", solution.policy.increments},
      {"stage_values", solution.stage_values},
      {"optimal_value", solution.optimal_value},
      {"log_concave", dist.log_concave()},
      {"rounded",
       {{"mode", std::string(to_string(mode))},
        {"increments", rounded.increments},
        {"cumulative", rounded.cumulative},
        {"expected_activities", expected_activities(dist, rounded_policy)}}},
      {"structure",
       {{"monotone_increments",
         {{"pass", structure.monotone_increments.pass},
          {"slack", optional_slack(structure.monotone_increments)}}},
        {"bounded_increments",
         {{"pass", structure.bounded_increments.pass},
          {"slack", optional_slack(structure.bounded_increments)},
          {"bound", structure.increment_bound}}},
        {"diminishing_gains",
         {{"pass", structure.diminishing_gains.pass},
          {"slack", optional_slack(structure.diminishing_gains)},
          {"gains", structure.marginal_gains}}},
        {"all_pass", structure.all_pass()}}}};
}

void print_optimize_text(const Json& p, std::ostream& out) {
  out << "distribution   " << p["distribution"].get<std::string>() << "\n";
  out << "tier  name      increment      cumulative  rounded\n";
  double cumulative = 0.0;
  for (std::size_t i = 0; i < p["increments"].size(); ++i) {
    const double inc = p["increments"][i].get<double>();
    cumulative += inc;
    out << std::setw(4) << i + 1 << "  " << std::left << std::setw(8)
        << p["tier_names"][i].get<std::string>() << std::right << std::setw(11)
        << io::format_double(inc) << std::setw(16) << io::format_double(cumulative)
        << std::setw(9) << p["rounded"]["cumulative"][i].get<std::int64_t>() << "\n";
  }
  out << "expected activities  " << io::format_double(p["optimal_value"].get<double>())
      << " (rounded policy " << io::format_double(p["rounded"]["expected_activities"].get<double>())
      << ", mode " << p["rounded"]["mode"].get<std::string>() << ")\n";
  out << "structure      " << (p["structure"]["all_pass"].get<bool>() ? "pass" : "FAIL") << "\n";
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Badge threshold design, fair recommendation plans and engagement reports",
               "engage"};
  app.require_subcommand(1);

  std::function<int()> action;
  std::string out_path;

  // badges -----------------------------------------------------------------
  auto* badges = app.add_subcommand("badges", "Badge threshold optimization and simulation");
  badges->require_subcommand(1);

  std::string dist_literal;
  int tiers = 3;
  std::string round_mode = "nearest";
  bool as_json = false;
  auto* optimize = badges->add_subcommand("optimize", "Optimal tier increments for a prior");
  optimize->add_option("--dist", dist_literal, "uniform:LO,HI or exponential:RATE")->required();
  optimize->add_option("--tiers", tiers, "Number of badge tiers")->capture_default_str();
  optimize->add_option("--round", round_mode, "nearest|floor|ceil|floor-first")
      ->capture_default_str();
  optimize->add_flag("--json", as_json, "Emit JSON");
  optimize->add_option("--out", out_path, "Output file (default stdout)");
  optimize->callback([&] {
    action = [&] {
      const auto dist = MotivationDistribution::parse(dist_literal);
      const Json payload = optimize_payload(dist, tiers, parse_rounding_mode(round_mode));
      if (as_json || !out_path.empty()) {
        emit(payload, out_path, out);
      } else {
        print_optimize_text(payload, out);
      }
      return kExitOk;
    };
  });

  std::string thresholds_csv;
  std::int64_t reps = 100000;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  auto* simulate = badges->add_subcommand("simulate", "Monte Carlo estimate for a policy");
  simulate->add_option("--dist", dist_literal, "uniform:LO,HI or exponential:RATE")->required();
  simulate->add_option("--thresholds", thresholds_csv, "Comma-separated increments")->required();
  simulate->add_option("--reps", reps, "Replications")->capture_default_str();
  simulate->add_option("--seed", seed, "Seed")->capture_default_str();
  simulate->add_option("--workers", workers, "Worker threads (0 = hardware)");
  simulate->add_flag("--json", as_json, "Emit JSON");
  simulate->add_option("--out", out_path, "Output file (default stdout)");
  simulate->callback([&] {
    action = [&] {
      const auto dist = MotivationDistribution::parse(dist_literal);
      const auto policy = BadgePolicy::make(parse_csv<double>(thresholds_csv, "threshold"));
      const SimulationEstimate est = estimate_value(policy, dist, reps, seed, workers);
      const double analytic = expected_activities(dist, policy);
      const Json payload{{"distribution", dist.describe()},
                         {"increments", policy.increments},
                         {"replications", est.replications},
                         {"seed", est.seed},
                         {"mean", est.mean},
                         {"stderr", est.stderr_},
                         {"analytic", analytic}};
      if (as_json || !out_path.empty()) {
        emit(payload, out_path, out);
      } else {
        out << "mean " << io::format_double(est.mean) << " +/- " << io::format_double(est.stderr_)
            << " (analytic " << io::format_double(analytic) << ", reps " << est.replications
            << ", seed " << est.seed << ")\n";
      }
      return kExitOk;
    };
  });

  // recommend --------------------------------------------------------------
  auto* recommend = app.add_subcommand("recommend", "Fairness-constrained recommendation plans");
  recommend->require_subcommand(1);

  std::string businesses_path;
  std::string users_path;
  double ratio = kDefaultFairnessRatio;
  std::string period_id;
  auto* plan_cmd = recommend->add_subcommand("plan", "Solve the recommendation LP");
  plan_cmd->add_option("--businesses", businesses_path, "businesses.json")->required();
  plan_cmd->add_option("--users", users_path, "users.json")->required();
  plan_cmd->add_option("--ratio", ratio, "Min/max impression ratio")->capture_default_str();
  plan_cmd->add_option("--period", period_id, "Curation period id")->required();
  plan_cmd->add_option("--out", out_path, "Output file (default stdout)");
  plan_cmd->callback([&] {
    action = [&] {
      const auto businesses = io::load_businesses(businesses_path);
      const auto users = io::load_users(users_path);
      const auto plan = solve_plan(users, businesses, PlanConfig{ratio, period_id});
      emit(io::plan_to_json(plan), out_path, out);
      return kExitOk;
    };
  });

  std::string plan_path;
  std::string user_id;
  auto* sample_cmd = recommend->add_subcommand("sample", "Draw one carousel ordering");
  sample_cmd->add_option("--plan", plan_path, "plan.json")->required();
  sample_cmd->add_option("--user", user_id, "User id")->required();
  sample_cmd->add_option("--seed", seed, "Seed")->capture_default_str();
  sample_cmd->add_option("--out", out_path, "Output file (default stdout)");
  sample_cmd->callback([&] {
    action = [&] {
      const auto plan = io::plan_from_json(io::read_json_file(plan_path));
      Rng gen(seed);
      const auto order = sample_carousel(plan, user_id, gen);
      emit(Json{{"user", user_id}, {"seed", seed}, {"order", order}}, out_path, out);
      return kExitOk;
    };
  });

  auto* audit_cmd = recommend->add_subcommand("audit", "Check a plan's fairness ratio");
  audit_cmd->add_option("--plan", plan_path, "plan.json")->required();
  audit_cmd->add_option("--out", out_path, "Output file (default stdout)");
  audit_cmd->callback([&] {
    action = [&] {
      const auto plan = io::plan_from_json(io::read_json_file(plan_path));
      Json payload = io::audit_to_json(plan.audit);
      payload["required_ratio"] = plan.fairness_ratio_used;
      emit(payload, out_path, out);
      if (!plan.audit.pass) {
        err << "audit failed: ratio " << io::format_double(plan.audit.ratio) << " < "
            << io::format_double(plan.fairness_ratio_used) << "\n";
        return kExitValidation;
      }
      return kExitOk;
    };
  });

  // report -----------------------------------------------------------------
  std::string kind;
  std::string events_path;
  std::string business_id;
  std::string report_thresholds = "1,3,6";
  std::string occ = "any-gold";
  auto* report = app.add_subcommand("report", "Engagement reports for a period");
  report->add_option("kind", kind, "business|curator|department|student")
      ->required()
      ->check(CLI::IsMember({"business", "curator", "department", "student"}));
  report->add_option("--events", events_path, "events.jsonl")->required();
  report->add_option("--period", period_id, "YYYY-MM or YYYY-MM-DD/YYYY-MM-DD")->required();
  report->add_option("--user", user_id, "User id (student report)");
  report->add_option("--business", business_id, "Business id (business report)");
  report->add_option("--businesses", businesses_path, "Catalog (curator report)");
  report->add_option("--thresholds", report_thresholds, "Cumulative badge thresholds")
      ->capture_default_str();
  report->add_option("--occ-rule", occ, "any-gold|both-gold|any-badge")->capture_default_str();
  report->add_option("--out", out_path, "Output file (default stdout)");
  report->callback([&] {
    action = [&] {
      using namespace reporting;
      const auto events = ingest_events(events_path);
      const auto period = Period::parse(period_id);
      PeriodReport r;
      switch (parse_report_kind(kind)) {
        case ReportKind::business:
          if (business_id.empty()) throw ValidationError("business report needs --business");
          r = business_report(events, business_id, period);
          break;
        case ReportKind::curator: {
          std::vector<Business> catalog;
          if (!businesses_path.empty()) catalog = io::load_businesses(businesses_path);
          r = curator_report(events, catalog, period);
          break;
        }
        case ReportKind::department:
          r = department_report(events, period);
          break;
        case ReportKind::student: {
          if (user_id.empty()) throw ValidationError("student report needs --user");
          const auto cuts = BadgeThresholds::uniform(
              parse_csv<std::int64_t>(report_thresholds, "threshold"));
          r = student_report(events, user_id, period, cuts, occ_rule(occ));
          break;
        }
      }
      emit(r.payload, out_path, out);
      return kExitOk;
    };
  });

  // lp ---------------------------------------------------------------------
  auto* lp_cmd = app.add_subcommand("lp", "Linear program utilities");
  lp_cmd->require_subcommand(1);
  std::string lp_path;
  auto* lp_solve = lp_cmd->add_subcommand("solve", "Solve an LP from JSON");
  lp_solve->add_option("--in", lp_path, "lp.json")->required();
  lp_solve->add_option("--out", out_path, "Output file (default stdout)");
  lp_solve->callback([&] {
    action = [&] {
      const auto prog = io::lp_from_json(io::read_json_file(lp_path));
      emit(io::lp_solution_to_json(lp::solve(prog)), out_path, out);
      return kExitOk;
    };
  });

  // validate ---------------------------------------------------------------
  auto* validate = app.add_subcommand("validate", "Validate businesses/users catalogs");
  validate->add_option("--businesses", businesses_path, "businesses.json")->required();
  validate->add_option("--users", users_path, "users.json")->required();
  validate->add_option("--out", out_path, "Output file (default stdout)");
  validate->callback([&] {
    action = [&] {
      const auto violations = io::validate_catalogs(businesses_path, users_path);
      emit(io::violations_to_json(violations), out_path, out);
      return violations.empty() ? kExitOk : kExitValidation;
    };
  });

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("engage");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  // CLI11 reports a missing subcommand before an unknown one; name it instead
  CLI::App* level = &app;
  for (const auto& word : args) {
    if (word.empty() || word.front() == '-') break;
    const auto subs = level->get_subcommands([](CLI::App*) { return true; });
    if (subs.empty()) break;
    const auto it = std::find_if(subs.begin(), subs.end(),
                                 [&](CLI::App* sub) { return sub->get_name() == word; });
    if (it == subs.end()) {
      err << "error: unknown subcommand '" << word << "'\n\n" << level->help();
      return kExitValidation;
    }
    level = *it;
  }

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }
  if (!action) {
    err << app.help();
    return kExitValidation;
  }
  return guarded(err, action);
}

}  // namespace engage::cli
