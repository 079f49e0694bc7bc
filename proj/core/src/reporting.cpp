#include "engage/reporting.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <tuple>

#include "engage/errors.hpp"

namespace engage::reporting {
namespace {

using namespace std::chrono;

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return ec == std::errc() && ptr == s.data() + pos + len;
}

std::optional<sys_days> parse_date(std::string_view s) {
  int y = 0, m = 0, d = 0;
  if (s.size() != 10 || s[4] != '-' || s[7] != '-' || !read_int(s, 0, 4, y) ||
      !read_int(s, 5, 2, m) || !read_int(s, 8, 2, d)) {
    return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd};
}

struct Totals {
  std::int64_t explore = 0;
  std::int64_t social = 0;

  void add(Activity a) { (a == Activity::explore ? explore : social) += 1; }
  io::Json to_json() const {
    return io::Json{{"explore", explore}, {"social", social}, {"total", explore + social}};
  }
};

io::Json period_json(const Period& p) {
  return io::Json{{"id", p.id}, {"start", format_timestamp(p.start)},
                  {"end", format_timestamp(p.end)}};
}

std::vector<const ActivityEvent*> in_period(const std::vector<ActivityEvent>& events,
                                            const Period& period) {
  std::vector<const ActivityEvent*> out;
  for (const auto& e : events) {
    if (period.contains(e.timestamp)) out.push_back(&e);
  }
  return out;
}

io::Json business_payload(const std::vector<const ActivityEvent*>& events,
                          std::string_view business_id, const Period& period) {
  const auto week = days{7};
  const auto span = period.end - period.start;
  const auto weeks = static_cast<std::size_t>((span + week - seconds{1}) / week);
  std::vector<Totals> weekly(weeks);

  Totals totals;
  std::set<std::string> users;
  for (const auto* e : events) {
    if (e->business_id != business_id) continue;
    totals.add(e->activity);
    users.insert(e->user_id);
    const auto idx = static_cast<std::size_t>((e->timestamp - period.start) / week);
    weekly[idx].add(e->activity);
  }

  io::Json series = io::Json::array();
  for (std::size_t i = 0; i < weekly.size(); ++i) {
    io::Json w = weekly[i].to_json();
    w["week_start"] = format_date(period.start + week * static_cast<int>(i));
    series.push_back(std::move(w));
  }
  io::Json flags = io::Json::array();
  if (totals.explore + totals.social == 0) flags.push_back("no events");
  return io::Json{{"business_id", std::string(business_id)},
                  {"totals", totals.to_json()},
                  {"distinct_users", users.size()},
                  {"weekly", std::move(series)},
                  {"flags", std::move(flags)}};
}

constexpr const char* kSocialNote =
    "social counts are platform social-activity events, a proxy for follower growth";

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  const auto fail = [&]() -> Timestamp {
    throw ValidationError("bad timestamp '" + std::string(text) +
                          "' (expected YYYY-MM-DDTHH:MM:SSZ)");
  };
  if (text.size() < 20 || (text[10] != 'T' && text[10] != 't')) return fail();
  const auto date = parse_date(text.substr(0, 10));
  int hh = 0, mm = 0, ss = 0;
  if (!date || text[13] != ':' || text[16] != ':' || !read_int(text, 11, 2, hh) ||
      !read_int(text, 14, 2, mm) || !read_int(text, 17, 2, ss) || hh > 23 || mm > 59 ||
      ss > 60) {
    return fail();
  }
  std::size_t pos = 19;
  if (text[pos] == '.') {
    ++pos;
    const std::size_t digits = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    if (pos == digits) return fail();
  }
  Timestamp ts = *date + hours{hh} + minutes{mm} + seconds{ss};
  const std::string_view zone = text.substr(pos);
  if (zone == "Z" || zone == "z") return ts;
  int oh = 0, om = 0;
  if (zone.size() != 6 || (zone[0] != '+' && zone[0] != '-') || zone[3] != ':' ||
      !read_int(zone, 1, 2, oh) || !read_int(zone, 4, 2, om)) {
    return fail();
  }
  const auto offset = hours{oh} + minutes{om};
  return zone[0] == '+' ? ts - offset : ts + offset;
}

std::string format_timestamp(Timestamp ts) {
  const auto day_point = floor<days>(ts);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{ts - day_point};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buf;
}

std::string format_date(Timestamp ts) { return format_timestamp(ts).substr(0, 10); }

Period Period::parse(std::string_view text) {
  Period p;
  p.id = std::string(text);
  int y = 0, m = 0;
  if (text.size() == 7 && text[4] == '-' && read_int(text, 0, 4, y) && read_int(text, 5, 2, m) &&
      m >= 1 && m <= 12) {
    const year_month first{year{y}, month{static_cast<unsigned>(m)}};
    p.start = sys_days{first / 1};
    p.end = sys_days{(first + months{1}) / 1};
    return p;
  }
  const auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    const auto a = parse_date(text.substr(0, slash));
    const auto b = parse_date(text.substr(slash + 1));
    if (a && b && *a < *b) {
      p.start = *a;
      p.end = *b;
      return p;
    }
  }
  throw ValidationError("bad period '" + std::string(text) +
                        "' (expected YYYY-MM or YYYY-MM-DD/YYYY-MM-DD)");
}

std::vector<ActivityEvent> parse_events(std::istream& in, const std::string& source) {
  struct Numbered {
    ActivityEvent event;
    std::size_t line;
  };
  std::vector<Numbered> parsed;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = source + ":" + std::to_string(line_no) + ": ";

    io::Json obj;
    try {
      obj = io::Json::parse(line);
    } catch (const io::Json::parse_error&) {
      throw ValidationError(where + "malformed JSON");
    }
    if (!obj.is_object()) throw ValidationError(where + "expected a JSON object");
    const auto field = [&](const char* key) -> std::string {
      if (!obj.contains(key) || !obj[key].is_string() || obj[key].get<std::string>().empty()) {
        throw ValidationError(where + "missing or non-string field '" + key + "'");
      }
      return obj[key].get<std::string>();
    };

    ActivityEvent e;
    e.user_id = field("user_id");
    e.business_id = field("business_id");
    const std::string activity = field("activity");
    const auto parsed_activity = parse_activity(activity);
    if (!parsed_activity) {
      throw ValidationError(where + "unknown activity '" + activity +
                            "' (expected explore or social)");
    }
    e.activity = *parsed_activity;
    try {
      e.timestamp = parse_timestamp(field("timestamp"));
    } catch (const ValidationError& err) {
      throw ValidationError(where + err.what());
    }
    if (obj.contains("department") && !obj["department"].is_null()) {
      if (!obj["department"].is_string()) {
        throw ValidationError(where + "field 'department' must be a string");
      }
      e.department = obj["department"].get<std::string>();
    }
    parsed.push_back({std::move(e), line_no});
  }

  std::stable_sort(parsed.begin(), parsed.end(), [](const Numbered& a, const Numbered& b) {
    return a.event.timestamp < b.event.timestamp;
  });
  std::set<std::tuple<std::string, std::string, Activity>> seen;
  std::vector<ActivityEvent> out;
  for (auto& n : parsed) {
    if (seen.emplace(n.event.user_id, n.event.business_id, n.event.activity).second) {
      out.push_back(std::move(n.event));
    }
  }
  return out;
}

std::vector<ActivityEvent> ingest_events(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path.string());
  return parse_events(in, path.string());
}

BadgeThresholds BadgeThresholds::uniform(std::vector<std::int64_t> cumulative) {
  BadgeThresholds t;
  t.explore = cumulative;
  t.social = std::move(cumulative);
  t.validate();
  return t;
}

void BadgeThresholds::validate() const {
  for (const auto* list : {&explore, &social}) {
    if (list->empty()) throw ValidationError("badge thresholds must not be empty");
    std::int64_t prev = 0;
    for (std::int64_t v : *list) {
      if (v <= prev) {
        throw ValidationError("badge thresholds must be positive and strictly increasing");
      }
      prev = v;
    }
  }
}

FamilyProgress progress_for(std::int64_t count, const std::vector<std::int64_t>& cumulative) {
  static const std::vector<std::string> kNames{"bronze", "silver", "gold"};
  FamilyProgress p;
  p.completed_count = count;
  p.tiers_available = cumulative.size();
  for (std::int64_t threshold : cumulative) {
    if (count >= threshold) ++p.tier;
  }
  if (p.tier > 0) {
    p.tier_name = cumulative.size() == 3 ? kNames[p.tier - 1] : "tier" + std::to_string(p.tier);
  }
  return p;
}

std::vector<BadgeState> award_badges(const std::vector<ActivityEvent>& events,
                                     const BadgeThresholds& thresholds) {
  thresholds.validate();
  std::map<std::string, Totals> counts;
  for (const auto& e : events) counts[e.user_id].add(e.activity);

  std::vector<BadgeState> out;
  for (const auto& [user, t] : counts) {
    BadgeState s;
    s.user_id = user;
    s.explore = progress_for(t.explore, thresholds.explore);
    s.social = progress_for(t.social, thresholds.social);
    out.push_back(std::move(s));
  }
  return out;
}

OccRule occ_rule(std::string_view name) {
  if (name == "any-gold") {
    return {"any-gold", [](const BadgeState& s) { return s.explore.top_tier() || s.social.top_tier(); }};
  }
  if (name == "both-gold") {
    return {"both-gold", [](const BadgeState& s) { return s.explore.top_tier() && s.social.top_tier(); }};
  }
  if (name == "any-badge") {
    return {"any-badge", [](const BadgeState& s) { return s.explore.tier > 0 || s.social.tier > 0; }};
  }
  throw ValidationError("unknown OCC rule '" + std::string(name) +
                        "' (expected any-gold, both-gold or any-badge)");
}

std::string_view to_string(ReportKind kind) {
  switch (kind) {
    case ReportKind::curator:
      return "curator";
    case ReportKind::business:
      return "business";
    case ReportKind::department:
      return "department";
    case ReportKind::student:
      return "student";
  }
  return "business";
}

ReportKind parse_report_kind(std::string_view text) {
  for (ReportKind k : {ReportKind::curator, ReportKind::business, ReportKind::department,
                       ReportKind::student}) {
    if (to_string(k) == text) return k;
  }
  throw ValidationError("unknown report kind '" + std::string(text) + "'");
}

PeriodReport business_report(const std::vector<ActivityEvent>& events,
                             std::string_view business_id, const Period& period) {
  PeriodReport r;
  r.kind = ReportKind::business;
  r.period_id = period.id;
  r.payload = business_payload(in_period(events, period), business_id, period);
  r.payload["kind"] = "business";
  r.payload["period"] = period_json(period);
  r.payload["note"] = kSocialNote;
  return r;
}

PeriodReport curator_report(const std::vector<ActivityEvent>& events,
                            const std::vector<Business>& businesses, const Period& period) {
  const auto selected = in_period(events, period);
  std::set<std::string> ids;
  std::map<std::string, std::string> names;
  for (const auto& b : businesses) {
    ids.insert(b.id);
    names[b.id] = b.name;
  }
  for (const auto* e : selected) ids.insert(e->business_id);

  Totals totals;
  for (const auto* e : selected) totals.add(e->activity);

  io::Json list = io::Json::array();
  for (const auto& id : ids) {
    io::Json entry = business_payload(selected, id, period);
    if (const auto it = names.find(id); it != names.end()) entry["name"] = it->second;
    entry["in_catalog"] = names.contains(id);
    list.push_back(std::move(entry));
  }

  PeriodReport r;
  r.kind = ReportKind::curator;
  r.period_id = period.id;
  r.payload = io::Json{{"kind", "curator"},
                       {"period", period_json(period)},
                       {"businesses", std::move(list)},
                       {"business_count", ids.size()},
                       {"totals", totals.to_json()},
                       {"note", kSocialNote}};
  return r;
}

PeriodReport department_report(const std::vector<ActivityEvent>& events, const Period& period) {
  std::map<std::string, Totals> totals_by_dept;
  std::map<std::string, std::set<std::string>> users_by_dept;
  Totals totals;
  for (const auto* e : in_period(events, period)) {
    const std::string dept = e->department.value_or("unknown");
    totals_by_dept[dept].add(e->activity);
    users_by_dept[dept].insert(e->user_id);
    totals.add(e->activity);
  }

  io::Json list = io::Json::array();
  for (const auto& [dept, t] : totals_by_dept) {
    io::Json entry = t.to_json();
    entry["department"] = dept;
    entry["distinct_users"] = users_by_dept[dept].size();
    list.push_back(std::move(entry));
  }

  PeriodReport r;
  r.kind = ReportKind::department;
  r.period_id = period.id;
  r.payload = io::Json{{"kind", "department"},
                       {"period", period_json(period)},
                       {"departments", std::move(list)},
                       {"totals", totals.to_json()}};
  return r;
}

PeriodReport student_report(const std::vector<ActivityEvent>& events, std::string_view user_id,
                            const Period& period, const BadgeThresholds& thresholds,
                            const OccRule& rule) {
  thresholds.validate();
  Totals totals;
  std::map<std::string, Totals> per_business;
  std::vector<ActivityEvent> to_date;
  for (const auto& e : events) {
    if (e.user_id != user_id) continue;
    if (e.timestamp < period.end) to_date.push_back(e);
    if (period.contains(e.timestamp)) {
      totals.add(e.activity);
      per_business[e.business_id].add(e.activity);
    }
  }

  BadgeState state;
  state.user_id = std::string(user_id);
  state.explore = progress_for(0, thresholds.explore);
  state.social = progress_for(0, thresholds.social);
  if (const auto awarded = award_badges(to_date, thresholds); !awarded.empty()) {
    state = awarded.front();
  }

  const auto family_json = [](const FamilyProgress& p, const std::vector<std::int64_t>& cut) {
    return io::Json{{"completed_count", p.completed_count},
                    {"tier", p.tier_name},
                    {"thresholds", cut}};
  };
  io::Json breakdown = io::Json::array();
  for (const auto& [biz, t] : per_business) {
    io::Json entry = t.to_json();
    entry["business_id"] = biz;
    breakdown.push_back(std::move(entry));
  }

  PeriodReport r;
  r.kind = ReportKind::student;
  r.period_id = period.id;
  r.payload = io::Json{
      {"kind", "student"},
      {"period", period_json(period)},
      {"user_id", std::string(user_id)},
      {"totals", totals.to_json()},
      {"businesses", std::move(breakdown)},
      {"badges",
       {{"explore", family_json(state.explore, thresholds.explore)},
        {"social", family_json(state.social, thresholds.social)}}},
      {"occ_credit_eligible", rule.predicate(state)},
      {"occ_rule", rule.name}};
  return r;
}

}  // namespace engage::reporting
