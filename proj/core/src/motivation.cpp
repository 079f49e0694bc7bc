#include "engage/motivation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "engage/errors.hpp"

namespace engage {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTailMass = 1e-15;

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

double effective_max_of(const MotivationFamily& family) {
  const double hi = family.support_max();
  if (std::isfinite(hi)) return hi;
  return family.quantile(1.0 - kTailMass);
}

double hazard_of(const MotivationFamily& family, double t) {
  const double s = family.survival(t);
  if (s <= 0.0) return kInf;
  return family.pdf(t) / s;
}

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double eps,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

LogConcavityReport scan_log_concavity(const MotivationFamily& family, int grid_size) {
  if (grid_size < 3) {
    throw ValidationError("log-concavity grid needs at least 3 points");
  }
  LogConcavityReport report;
  const double a = family.quantile(1e-6);
  const double b = family.quantile(1.0 - 1e-6);
  report.grid.resize(static_cast<std::size_t>(grid_size));
  const double step = (b - a) / (grid_size - 1);
  for (int i = 0; i < grid_size; ++i) {
    report.grid[static_cast<std::size_t>(i)] = (i == grid_size - 1) ? b : a + step * i;
  }

  std::vector<double> logf(report.grid.size(), -kInf);
  std::size_t first_positive = report.grid.size();
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < report.grid.size(); ++i) {
    const double f = family.pdf(report.grid[i]);
    if (f > 0.0) {
      logf[i] = std::log(f);
      first_positive = std::min(first_positive, i);
      last_positive = i;
    }
  }

  for (std::size_t i = 1; i + 1 < report.grid.size(); ++i) {
    if (std::isinf(logf[i])) {
      report.skipped.push_back(report.grid[i]);
      // A zero-density hole between positive-density points: log f jumps to -inf.
      if (first_positive < i && i < last_positive) report.max_violation = kInf;
      continue;
    }
    if (std::isinf(logf[i - 1]) || std::isinf(logf[i + 1])) continue;
    const double second = logf[i - 1] - 2.0 * logf[i] + logf[i + 1];
    report.max_violation = std::max(report.max_violation, second);
  }
  report.is_log_concave = report.max_violation <= kLogConcavityTolerance;
  return report;
}

bool parse_real(std::string_view text, double& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace

double MotivationFamily::hazard_quantile(double rate) const {
  const double lo = support_min();
  if (rate <= 0.0 || hazard_of(*this, lo) >= rate) return lo;
  double hi = effective_max_of(*this);
  if (hazard_of(*this, hi) < rate) return kInf;
  double a = lo;
  for (int iter = 0; iter < 200 && hi - a > 1e-15 * std::max(1.0, hi); ++iter) {
    const double m = 0.5 * (a + hi);
    if (hazard_of(*this, m) >= rate) {
      hi = m;
    } else {
      a = m;
    }
  }
  return hi;
}

// --- uniform ---------------------------------------------------------------

UniformFamily::UniformFamily(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi)) || lo < 0.0 || !(lo < hi)) {
    throw ValidationError("uniform motivation needs 0 <= lo < hi, got lo=" + format_number(lo) +
                          " hi=" + format_number(hi));
  }
}

std::string UniformFamily::describe() const {
  return "uniform:" + format_number(lo_) + "," + format_number(hi_);
}

double UniformFamily::pdf(double t) const {
  return (t >= lo_ && t <= hi_) ? 1.0 / (hi_ - lo_) : 0.0;
}

double UniformFamily::cdf(double t) const {
  if (t <= lo_) return 0.0;
  if (t >= hi_) return 1.0;
  return (t - lo_) / (hi_ - lo_);
}

double UniformFamily::survival(double t) const {
  if (t <= lo_) return 1.0;
  if (t >= hi_) return 0.0;
  return (hi_ - t) / (hi_ - lo_);
}

double UniformFamily::mean() const { return 0.5 * (lo_ + hi_); }

double UniformFamily::truncated_mean_below(double t) const {
  const double c = std::clamp(t, lo_, hi_);
  return (c - lo_) * (c + lo_) / (2.0 * (hi_ - lo_));
}

double UniformFamily::quantile(double p) const {
  return lo_ + std::clamp(p, 0.0, 1.0) * (hi_ - lo_);
}

double UniformFamily::hazard_quantile(double rate) const {
  if (rate <= 0.0) return lo_;
  return std::max(lo_, hi_ - 1.0 / rate);
}

// --- exponential -----------------------------------------------------------

ExponentialFamily::ExponentialFamily(double rate) : rate_(rate) {
  if (!std::isfinite(rate) || rate <= 0.0) {
    throw ValidationError("exponential motivation needs rate > 0, got " + format_number(rate));
  }
}

std::string ExponentialFamily::describe() const { return "exponential:" + format_number(rate_); }

double ExponentialFamily::pdf(double t) const {
  return t < 0.0 ? 0.0 : rate_ * std::exp(-rate_ * t);
}

double ExponentialFamily::cdf(double t) const { return t <= 0.0 ? 0.0 : -std::expm1(-rate_ * t); }

double ExponentialFamily::survival(double t) const {
  return t <= 0.0 ? 1.0 : std::exp(-rate_ * t);
}

double ExponentialFamily::mean() const { return 1.0 / rate_; }

double ExponentialFamily::truncated_mean_below(double t) const {
  if (t <= 0.0) return 0.0;
  const double x = rate_ * t;
  return (-std::expm1(-x) - x * std::exp(-x)) / rate_;
}

double ExponentialFamily::quantile(double p) const {
  if (p <= 0.0) return 0.0;
  return -std::log1p(-std::min(p, std::nextafter(1.0, 0.0))) / rate_;
}

double ExponentialFamily::support_max() const { return kInf; }

double ExponentialFamily::hazard_quantile(double rate) const {
  return rate <= rate_ ? 0.0 : kInf;
}

// --- uniform mixture -------------------------------------------------------

UniformMixtureFamily::UniformMixtureFamily(std::vector<Component> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw ValidationError("uniform mixture needs a component");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight > 0.0) || c.lo < 0.0 || !(c.lo < c.hi) || !std::isfinite(c.hi)) {
      throw ValidationError("uniform mixture component needs weight > 0 and 0 <= lo < hi");
    }
    total += c.weight;
  }
  for (auto& c : components_) c.weight /= total;
}

std::string UniformMixtureFamily::describe() const {
  std::string out = "mixture:";
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto& c = components_[i];
    if (i) out += ";";
    out += format_number(c.weight) + "*uniform:" + format_number(c.lo) + "," + format_number(c.hi);
  }
  return out;
}

double UniformMixtureFamily::pdf(double t) const {
  double f = 0.0;
  for (const auto& c : components_) {
    if (t >= c.lo && t <= c.hi) f += c.weight / (c.hi - c.lo);
  }
  return f;
}

double UniformMixtureFamily::cdf(double t) const {
  double p = 0.0;
  for (const auto& c : components_) {
    p += c.weight * std::clamp((t - c.lo) / (c.hi - c.lo), 0.0, 1.0);
  }
  return std::min(p, 1.0);
}

double UniformMixtureFamily::mean() const {
  double m = 0.0;
  for (const auto& c : components_) m += c.weight * 0.5 * (c.lo + c.hi);
  return m;
}

double UniformMixtureFamily::truncated_mean_below(double t) const {
  double m = 0.0;
  for (const auto& c : components_) {
    const double x = std::clamp(t, c.lo, c.hi);
    m += c.weight * (x - c.lo) * (x + c.lo) / (2.0 * (c.hi - c.lo));
  }
  return m;
}

double UniformMixtureFamily::quantile(double p) const {
  double a = support_min();
  double b = support_max();
  if (p <= 0.0) return a;
  for (int iter = 0; iter < 200 && b - a > 1e-15 * std::max(1.0, b); ++iter) {
    const double m = 0.5 * (a + b);
    if (cdf(m) >= p) {
      b = m;
    } else {
      a = m;
    }
  }
  return b;
}

double UniformMixtureFamily::support_min() const {
  double lo = kInf;
  for (const auto& c : components_) lo = std::min(lo, c.lo);
  return lo;
}

double UniformMixtureFamily::support_max() const {
  double hi = 0.0;
  for (const auto& c : components_) hi = std::max(hi, c.hi);
  return hi;
}

// --- distribution ----------------------------------------------------------

MotivationDistribution::MotivationDistribution(std::shared_ptr<const MotivationFamily> family)
    : family_(std::move(family)) {
  log_concave_ = scan_log_concavity(*family_, kDefaultLogConcavityGrid).is_log_concave;
}

MotivationDistribution MotivationDistribution::uniform(double lo, double hi) {
  return MotivationDistribution(std::make_shared<UniformFamily>(lo, hi));
}

MotivationDistribution MotivationDistribution::exponential(double rate) {
  return MotivationDistribution(std::make_shared<ExponentialFamily>(rate));
}

MotivationDistribution MotivationDistribution::from_family(
    std::shared_ptr<const MotivationFamily> family) {
  if (!family) throw ValidationError("null motivation family");
  if (!(family->support_min() >= 0.0)) {
    throw ValidationError("motivation support must be nonnegative");
  }
  if (!family->exact()) {
    const double mass = integrate_density(*family);
    if (std::abs(mass - 1.0) > 1e-9) {
      throw ValidationError("motivation density integrates to " + format_number(mass) +
                            ", expected 1");
    }
  }
  return MotivationDistribution(std::move(family));
}

MotivationDistribution MotivationDistribution::parse(std::string_view literal) {
  const auto colon = literal.find(':');
  if (colon == std::string_view::npos) {
    throw ValidationError("bad distribution literal '" + std::string(literal) +
                          "': expected uniform:LO,HI or exponential:RATE");
  }
  const std::string_view kind = literal.substr(0, colon);
  const std::string_view args = literal.substr(colon + 1);
  if (kind == "uniform") {
    const auto comma = args.find(',');
    double lo = 0.0;
    double hi = 0.0;
    if (comma == std::string_view::npos || !parse_real(args.substr(0, comma), lo) ||
        !parse_real(args.substr(comma + 1), hi)) {
      throw ValidationError("bad uniform literal '" + std::string(literal) + "'");
    }
    return uniform(lo, hi);
  }
  if (kind == "exponential") {
    double rate = 0.0;
    if (!parse_real(args, rate)) {
      throw ValidationError("bad exponential literal '" + std::string(literal) + "'");
    }
    return exponential(rate);
  }
  throw ValidationError("unknown distribution family '" + std::string(kind) + "'");
}

double MotivationDistribution::hazard(double t) const {
  const double s = survival(t);
  if (!(s > 0.0)) {
    throw ValidationError("hazard undefined at t=" + format_number(t) + " (survival is zero)");
  }
  return pdf(t) / s;
}

double MotivationDistribution::inverse_hazard(double rate) const {
  const double t = family_->hazard_quantile(rate);
  if (!(rate > 0.0) || !std::isfinite(t) || survival(t) <= 0.0) {
    throw ValidationError("no preimage for hazard rate " + format_number(rate));
  }
  const double h = hazard(t);
  if (std::abs(h - rate) > 1e-9 * std::max(1.0, rate)) {
    throw ValidationError("no preimage for hazard rate " + format_number(rate));
  }
  return t;
}

double MotivationDistribution::hazard_quantile(double rate) const {
  const double t = family_->hazard_quantile(rate);
  return std::min(t, effective_max());
}

double MotivationDistribution::effective_max() const { return effective_max_of(*family_); }

LogConcavityReport check_log_concavity(const MotivationDistribution& dist, int grid_size) {
  return scan_log_concavity(dist.family(), grid_size);
}

double integrate_density(const MotivationFamily& family) {
  const double a = family.support_min();
  const double b = effective_max_of(family);
  const std::function<double(double)> f = [&family](double t) { return family.pdf(t); };
  constexpr int kPanels = 64;
  double body = 0.0;
  for (int i = 0; i < kPanels; ++i) {
    const double lo = a + (b - a) * i / kPanels;
    const double hi = (i == kPanels - 1) ? b : a + (b - a) * (i + 1) / kPanels;
    const double flo = f(lo);
    const double fhi = f(hi);
    const double fm = f(0.5 * (lo + hi));
    const double whole = simpson(lo, hi, flo, fm, fhi);
    body += adaptive_simpson(f, lo, hi, flo, fm, fhi, whole, 1e-12 / kPanels, 50);
  }
  return body + family.survival(b);
}

}  // namespace engage
