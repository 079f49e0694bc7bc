#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "engage/rng.hpp"

namespace engage {

// A continuous family on a nonnegative support. Subclass this to add a new
// motivation prior; the base class supplies numeric defaults for everything
// that has a generic formula.
class MotivationFamily {
 public:
  virtual ~MotivationFamily() = default;

  // Literal form (`uniform:0,5`); families without one return a description.
  virtual std::string describe() const = 0;

  virtual double pdf(double t) const = 0;
  virtual double cdf(double t) const = 0;
  virtual double survival(double t) const { return 1.0 - cdf(t); }
  virtual double mean() const = 0;
  // E[V 1{V < t}]
  virtual double truncated_mean_below(double t) const = 0;
  // Inverse cdf for p in [0, 1).
  virtual double quantile(double p) const = 0;
  virtual double support_min() const = 0;
  // May be +infinity.
  virtual double support_max() const = 0;

  // Smallest t in the support with hazard(t) >= rate, or +infinity when the
  // hazard never reaches `rate`. Default is bisection on a nondecreasing hazard.
  virtual double hazard_quantile(double rate) const;

  // Closed-form families set this to skip the numeric normalization check.
  virtual bool exact() const { return false; }
};

class UniformFamily final : public MotivationFamily {
 public:
  UniformFamily(double lo, double hi);

  std::string describe() const override;
  double pdf(double t) const override;
  double cdf(double t) const override;
  double survival(double t) const override;
  double mean() const override;
  double truncated_mean_below(double t) const override;
  double quantile(double p) const override;
  double support_min() const override { return lo_; }
  double support_max() const override { return hi_; }
  double hazard_quantile(double rate) const override;
  bool exact() const override { return true; }

  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double lo_;
  double hi_;
};

class ExponentialFamily final : public MotivationFamily {
 public:
  explicit ExponentialFamily(double rate);

  std::string describe() const override;
  double pdf(double t) const override;
  double cdf(double t) const override;
  double survival(double t) const override;
  double mean() const override;
  double truncated_mean_below(double t) const override;
  double quantile(double p) const override;
  double support_min() const override { return 0.0; }
  double support_max() const override;
  double hazard_quantile(double rate) const override;
  bool exact() const override { return true; }

  double rate() const { return rate_; }

 private:
  double rate_;
};

// Finite mixture of uniform components. Not log-concave in general; used to
// exercise the non-log-concave paths.
class UniformMixtureFamily final : public MotivationFamily {
 public:
  struct Component {
    double weight;
    double lo;
    double hi;
  };

  explicit UniformMixtureFamily(std::vector<Component> components);

  std::string describe() const override;
  double pdf(double t) const override;
  double cdf(double t) const override;
  double mean() const override;
  double truncated_mean_below(double t) const override;
  double quantile(double p) const override;
  double support_min() const override;
  double support_max() const override;

 private:
  std::vector<Component> components_;
};

struct LogConcavityReport {
  bool is_log_concave = true;
  std::vector<double> grid;
  // Largest positive second difference of log f; +inf across a zero-density gap.
  double max_violation = 0.0;
  // Interior grid points with zero density.
  std::vector<double> skipped;
};

inline constexpr double kLogConcavityTolerance = 1e-9;
inline constexpr int kDefaultLogConcavityGrid = 1024;

// The motivation prior F. Cheap to copy; the family is shared and immutable.
class MotivationDistribution {
 public:
  static MotivationDistribution uniform(double lo, double hi);
  static MotivationDistribution exponential(double rate);
  // Validates support and normalization (to 1e-9) for non-closed-form families.
  static MotivationDistribution from_family(std::shared_ptr<const MotivationFamily> family);
  // `uniform:LO,HI` or `exponential:RATE`.
  static MotivationDistribution parse(std::string_view literal);

  std::string describe() const { return family_->describe(); }
  const MotivationFamily& family() const { return *family_; }

  double pdf(double t) const { return family_->pdf(t); }
  double cdf(double t) const { return family_->cdf(t); }
  double survival(double t) const { return family_->survival(t); }
  double mean() const { return family_->mean(); }
  double truncated_mean_below(double t) const { return family_->truncated_mean_below(t); }
  double quantile(double p) const { return family_->quantile(p); }
  double support_min() const { return family_->support_min(); }
  double support_max() const { return family_->support_max(); }

  // f(t) / survival(t). Throws ValidationError("hazard undefined") where the
  // survival is zero.
  double hazard(double t) const;
  // t with hazard(t) = rate. Throws ValidationError("no preimage") when `rate`
  // is outside the hazard's range. A flat hazard resolves to the smallest t.
  double inverse_hazard(double rate) const;
  // Generalized inverse: smallest t in the support with hazard(t) >= rate,
  // clamped to the support. Never throws for rate > 0.
  double hazard_quantile(double rate) const;

  // Right end of the region searched by optimizers: support_max when finite,
  // otherwise the 1 - 1e-15 quantile.
  double effective_max() const;

  bool log_concave() const { return log_concave_; }

  template <std::uniform_random_bit_generator Gen>
  double sample(Gen& gen) const {
    return family_->quantile(unit_uniform(gen));
  }

 private:
  explicit MotivationDistribution(std::shared_ptr<const MotivationFamily> family);

  std::shared_ptr<const MotivationFamily> family_;
  bool log_concave_ = true;
};

LogConcavityReport check_log_concavity(const MotivationDistribution& dist,
                                       int grid_size = kDefaultLogConcavityGrid);

// Adaptive Simpson integral of the density over the support.
double integrate_density(const MotivationFamily& family);

}  // namespace engage
