#include "engage/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "engage/errors.hpp"

namespace engage::lp {
namespace {

constexpr double kPivotEps = 1e-9;
constexpr double kCostEps = 1e-9;
constexpr int kDegenerateRunBeforeBland = 50;

enum class Outcome { optimal, unbounded };

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double rhs(std::size_t r) const { return at(r, cols_); }
  // Row `rows_` holds reduced costs c_j - c_B B^-1 A_j; its rhs is -objective.
  double& cost(std::size_t c) { return at(rows_, c); }
  double cost(std::size_t c) const { return at(rows_, c); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }
  const std::vector<std::size_t>& basis() const { return basis_; }

  void pivot(std::size_t p, std::size_t q) {
    const double inv = 1.0 / at(p, q);
    double* prow = &data_[p * (cols_ + 1)];
    for (std::size_t c = 0; c <= cols_; ++c) prow[c] *= inv;
    prow[q] = 1.0;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == p) continue;
      double* row = &data_[r * (cols_ + 1)];
      const double factor = row[q];
      if (factor == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) row[c] -= factor * prow[c];
      row[q] = 0.0;
    }
    basis_[p] = q;
  }

  // Rebuilds the reduced-cost row for column costs `c` (size cols_).
  void price(const std::vector<double>& c) {
    for (std::size_t j = 0; j < cols_; ++j) cost(j) = c[j];
    at(rows_, cols_) = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      const double cb = c[basis_[r]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) at(rows_, j) -= cb * at(r, j);
    }
  }

  void drop_row(std::size_t r) {
    data_.erase(data_.begin() + static_cast<std::ptrdiff_t>(r * (cols_ + 1)),
                data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * (cols_ + 1)));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    --rows_;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
  std::vector<std::size_t> basis_;
};

struct PivotBudget {
  std::size_t used = 0;
  std::size_t cap = 0;
};

Outcome iterate(Tableau& t, std::size_t allowed_cols, PivotBudget& budget) {
  int degenerate_run = 0;
  for (;;) {
    const bool bland = degenerate_run >= kDegenerateRunBeforeBland;
    std::size_t q = allowed_cols;
    double best = kCostEps;
    for (std::size_t j = 0; j < allowed_cols; ++j) {
      const double d = t.cost(j);
      if (d > best) {
        q = j;
        if (bland) break;
        best = d;
      }
    }
    if (q == allowed_cols) return Outcome::optimal;

    std::size_t p = t.rows();
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double a = t.at(r, q);
      if (a <= kPivotEps) continue;
      const double ratio = std::max(0.0, t.rhs(r)) / a;
      const double slack = 1e-12 * (1.0 + std::abs(best_ratio));
      if (p == t.rows() || ratio < best_ratio - slack) {
        p = r;
        best_ratio = ratio;
      } else if (ratio <= best_ratio + slack && t.basis()[r] < t.basis()[p]) {
        p = r;
      }
    }
    if (p == t.rows()) return Outcome::unbounded;

    if (++budget.used > budget.cap) {
      throw InternalError("simplex iteration cap reached (" + std::to_string(budget.cap) + ")");
    }
    degenerate_run = best_ratio <= kPivotEps ? degenerate_run + 1 : 0;
    t.pivot(p, q);
  }
}

}  // namespace

std::string_view to_string(Status status) {
  switch (status) {
    case Status::optimal:
      return "optimal";
    case Status::infeasible:
      return "infeasible";
    case Status::unbounded:
      return "unbounded";
  }
  return "infeasible";
}

void LinearProgram::validate() const {
  const std::size_t n = num_vars();
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(objective.begin(), objective.end(), finite)) {
    throw ValidationError("LP objective has non-finite coefficients");
  }
  const auto check_block = [&](const Matrix& a, const std::vector<double>& b,
                               const char* name) {
    if (a.size() != b.size()) {
      throw ValidationError(std::string("LP ") + name + " block: row count != rhs length");
    }
    for (const auto& row : a) {
      if (row.size() != n) {
        throw ValidationError(std::string("LP ") + name + " block: row width != variable count");
      }
      if (!std::all_of(row.begin(), row.end(), finite)) {
        throw ValidationError(std::string("LP ") + name + " block has non-finite coefficients");
      }
    }
    if (!std::all_of(b.begin(), b.end(), finite)) {
      throw ValidationError(std::string("LP ") + name + " rhs has non-finite entries");
    }
  };
  check_block(eq_A, eq_b, "eq");
  check_block(ub_A, ub_b, "ub");
  if (!lower_bounds.empty() && lower_bounds.size() != n) {
    throw ValidationError("LP lower bounds length != variable count");
  }
  if (!std::all_of(lower_bounds.begin(), lower_bounds.end(), finite)) {
    throw ValidationError("LP lower bounds must be finite");
  }
}

LpSolution solve(const LinearProgram& lp) {
  lp.validate();
  const std::size_t n = lp.num_vars();
  const std::size_t m_eq = lp.eq_A.size();
  const std::size_t m_ub = lp.ub_A.size();
  const std::size_t m = m_eq + m_ub;

  // Shift to y = x - lower >= 0 and make every rhs nonnegative.
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::vector<int> slack_sign;  // +1 / -1 for ub rows, 0 for eq rows
  rows.reserve(m);
  const auto shifted_rhs = [&](const std::vector<double>& a, double b) {
    double r = b;
    for (std::size_t j = 0; j < n; ++j) r -= a[j] * lp.lower_bound(j);
    return r;
  };
  for (std::size_t i = 0; i < m_eq; ++i) {
    rows.push_back(lp.eq_A[i]);
    rhs.push_back(shifted_rhs(lp.eq_A[i], lp.eq_b[i]));
    slack_sign.push_back(0);
  }
  for (std::size_t i = 0; i < m_ub; ++i) {
    rows.push_back(lp.ub_A[i]);
    rhs.push_back(shifted_rhs(lp.ub_A[i], lp.ub_b[i]));
    slack_sign.push_back(1);
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (rhs[i] < 0.0) {
      for (double& a : rows[i]) a = -a;
      rhs[i] = -rhs[i];
      slack_sign[i] = -slack_sign[i];
    }
  }

  // Columns: structural [0, n), slacks [n, n + m_ub), artificials after.
  std::size_t artificials = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (slack_sign[i] != 1) ++artificials;
  }
  const std::size_t first_art = n + m_ub;
  const std::size_t cols = first_art + artificials;

  Tableau t(m, cols);
  std::size_t next_art = first_art;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t.at(i, j) = rows[i][j];
    if (i >= m_eq) t.at(i, n + (i - m_eq)) = static_cast<double>(slack_sign[i]);
    t.rhs(i) = rhs[i];
    if (slack_sign[i] == 1) {
      t.basis()[i] = n + (i - m_eq);
    } else {
      t.at(i, next_art) = 1.0;
      t.basis()[i] = next_art++;
    }
  }

  PivotBudget budget;
  budget.cap = 10 * (m + cols) * (m + cols);

  if (artificials > 0) {
    std::vector<double> phase1(cols, 0.0);
    for (std::size_t j = first_art; j < cols; ++j) phase1[j] = -1.0;
    t.price(phase1);
    iterate(t, cols, budget);

    double rhs_scale = 1.0;
    for (double r : rhs) rhs_scale = std::max(rhs_scale, std::abs(r));
    const double infeasibility = t.at(t.rows(), cols);  // = sum of artificials
    if (infeasibility > 1e-9 * rhs_scale) {
      LpSolution out;
      out.status = Status::infeasible;
      out.iterations = budget.used;
      return out;
    }

    // Drive zero-level artificials out of the basis; drop redundant rows.
    for (std::size_t r = 0; r < t.rows();) {
      if (t.basis()[r] < first_art) {
        ++r;
        continue;
      }
      std::size_t q = first_art;
      for (std::size_t j = 0; j < first_art; ++j) {
        if (std::abs(t.at(r, j)) > kPivotEps) {
          q = j;
          break;
        }
      }
      if (q == first_art) {
        t.drop_row(r);
        continue;
      }
      t.pivot(r, q);
      ++r;
    }
  }

  std::vector<double> phase2(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) phase2[j] = lp.objective[j];
  t.price(phase2);

  LpSolution out;
  const Outcome outcome = iterate(t, first_art, budget);
  out.iterations = budget.used;
  if (outcome == Outcome::unbounded) {
    out.status = Status::unbounded;
    return out;
  }

  out.status = Status::optimal;
  out.x.assign(n, 0.0);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const std::size_t j = t.basis()[r];
    if (j < n) out.x[j] = std::max(0.0, t.rhs(r));
  }
  for (std::size_t j = 0; j < n; ++j) out.x[j] += lp.lower_bound(j);
  out.objective_value = objective_value(lp, out.x);
  return out;
}

double ViolationReport::max_violation() const { return std::max({max_eq, max_ub, max_lb}); }

double objective_value(const LinearProgram& lp, const std::vector<double>& x) {
  double v = 0.0;
  for (std::size_t j = 0; j < lp.num_vars(); ++j) v += lp.objective[j] * x[j];
  return v;
}

ViolationReport check_solution(const LinearProgram& lp, const std::vector<double>& x,
                               double tol) {
  if (x.size() != lp.num_vars()) throw ValidationError("solution length != variable count");
  const auto dot = [&](const std::vector<double>& a) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * x[j];
    return s;
  };

  ViolationReport report;
  for (std::size_t i = 0; i < lp.eq_A.size(); ++i) {
    const double v = std::abs(dot(lp.eq_A[i]) - lp.eq_b[i]);
    report.max_eq = std::max(report.max_eq, v);
    if (v > tol) report.violations.push_back({"eq", i, v});
  }
  for (std::size_t i = 0; i < lp.ub_A.size(); ++i) {
    const double v = std::max(0.0, dot(lp.ub_A[i]) - lp.ub_b[i]);
    report.max_ub = std::max(report.max_ub, v);
    if (v > tol) report.violations.push_back({"ub", i, v});
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double v = std::max(0.0, lp.lower_bound(j) - x[j]);
    report.max_lb = std::max(report.max_lb, v);
    if (v > tol) report.violations.push_back({"lb", j, v});
  }
  return report;
}

}  // namespace engage::lp
