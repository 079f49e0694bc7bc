#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace engage::lp {

using Matrix = std::vector<std::vector<double>>;

// maximize objective . x
//   subject to  eq_A x  = eq_b
//               ub_A x <= ub_b
//               x >= lower_bounds (all zero when empty)
struct LinearProgram {
  std::vector<double> objective;
  Matrix eq_A;
  std::vector<double> eq_b;
  Matrix ub_A;
  std::vector<double> ub_b;
  std::vector<double> lower_bounds;

  std::size_t num_vars() const { return objective.size(); }
  double lower_bound(std::size_t j) const {
    return lower_bounds.empty() ? 0.0 : lower_bounds[j];
  }
  // Throws ValidationError on inconsistent dimensions or non-finite entries.
  void validate() const;
};

enum class Status { optimal, infeasible, unbounded };

std::string_view to_string(Status status);

struct LpSolution {
  Status status = Status::infeasible;
  std::vector<double> x;
  double objective_value = 0.0;
  std::size_t iterations = 0;
};

// Dense two-phase tableau simplex. Entering columns follow Dantzig's rule and
// switch to Bland's rule after a run of degenerate pivots; all ties go to the
// lowest index. Returns infeasible/unbounded as statuses. Throws
// InternalError if the 10 * (rows + cols)^2 iteration cap is reached.
LpSolution solve(const LinearProgram& lp);

struct Violation {
  std::string group;  // "eq", "ub" or "lb"
  std::size_t index = 0;
  double magnitude = 0.0;
};

struct ViolationReport {
  double max_eq = 0.0;
  double max_ub = 0.0;
  double max_lb = 0.0;
  // Constraints violated by more than the tolerance passed to check_solution.
  std::vector<Violation> violations;

  bool feasible() const { return violations.empty(); }
  double max_violation() const;
};

ViolationReport check_solution(const LinearProgram& lp, const std::vector<double>& x,
                               double tol = 1e-8);

double objective_value(const LinearProgram& lp, const std::vector<double>& x);

}  // namespace engage::lp
