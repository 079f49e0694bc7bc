#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "engage/json_io.hpp"
#include "engage/recommender.hpp"

namespace engage::reporting {

using Timestamp = std::chrono::sys_seconds;

// ISO-8601 with a `Z` or ±HH:MM offset; fractional seconds are truncated.
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp ts);
std::string format_date(Timestamp ts);

struct ActivityEvent {
  std::string user_id;
  std::string business_id;
  Activity activity = Activity::explore;
  Timestamp timestamp{};
  std::optional<std::string> department;
};

// Half-open UTC window [start, end).
struct Period {
  std::string id;
  Timestamp start{};
  Timestamp end{};

  // `YYYY-MM` (calendar month) or `YYYY-MM-DD/YYYY-MM-DD`.
  static Period parse(std::string_view text);
  bool contains(Timestamp ts) const { return ts >= start && ts < end; }
};

// One JSON object per line; blank lines are skipped. Output is sorted by
// timestamp and duplicate (user, business, activity) triples keep the earliest.
// Errors name the line number.
std::vector<ActivityEvent> parse_events(std::istream& in, const std::string& source = "events");
std::vector<ActivityEvent> ingest_events(const std::filesystem::path& path);

// Cumulative activity counts at which each tier is awarded.
struct BadgeThresholds {
  std::vector<std::int64_t> explore{1, 3, 6};
  std::vector<std::int64_t> social{1, 3, 6};

  static BadgeThresholds uniform(std::vector<std::int64_t> cumulative);
  // Throws ValidationError unless both lists are positive and strictly increasing.
  void validate() const;
};

struct FamilyProgress {
  std::int64_t completed_count = 0;
  std::size_t tier = 0;  // 0 = none
  std::string tier_name = "none";
  std::size_t tiers_available = 3;

  bool top_tier() const { return tier > 0 && tier == tiers_available; }
};

struct BadgeState {
  std::string user_id;
  FamilyProgress explore;
  FamilyProgress social;
};

FamilyProgress progress_for(std::int64_t count, const std::vector<std::int64_t>& cumulative);

// One state per user appearing in `events`, sorted by user id.
std::vector<BadgeState> award_badges(const std::vector<ActivityEvent>& events,
                                     const BadgeThresholds& thresholds = {});

using OccPredicate = std::function<bool(const BadgeState&)>;

struct OccRule {
  std::string name;
  OccPredicate predicate;
};

// "any-gold" (default): top tier in either family. "both-gold": top tier in
// both. "any-badge": at least one tier anywhere.
OccRule occ_rule(std::string_view name = "any-gold");

enum class ReportKind { curator, business, department, student };
std::string_view to_string(ReportKind kind);
ReportKind parse_report_kind(std::string_view text);

struct PeriodReport {
  ReportKind kind = ReportKind::business;
  std::string period_id;
  io::Json payload;
};

PeriodReport business_report(const std::vector<ActivityEvent>& events,
                             std::string_view business_id, const Period& period);

// All catalog businesses plus any business seen in the period's events.
PeriodReport curator_report(const std::vector<ActivityEvent>& events,
                            const std::vector<Business>& businesses, const Period& period);

PeriodReport department_report(const std::vector<ActivityEvent>& events, const Period& period);

// Counts are for the period; badge states use every event before the period
// end, since badges persist across periods.
PeriodReport student_report(const std::vector<ActivityEvent>& events, std::string_view user_id,
                            const Period& period, const BadgeThresholds& thresholds = {},
                            const OccRule& rule = occ_rule());

}  // namespace engage::reporting
