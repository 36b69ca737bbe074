#pragma once

#include <limits>

#include "sparselds/matrixcore.hpp"

namespace sparselds {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// minimize c'x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  lower <= x <= upper.
// Bounds may be infinite. Empty constraint blocks must still have n columns.
struct LinearProgram {
  Vector c;
  Matrix A_eq;
  Vector b_eq;
  Matrix A_ub;
  Vector b_ub;
  Vector lower;
  Vector upper;

  // n variables in [0, inf) with no constraints.
  static LinearProgram nonnegative(Eigen::Index n);

  Eigen::Index num_vars() const { return c.size(); }
  void validate() const;
  // Largest violation of any constraint or bound at x.
  double max_violation(const Vector& x) const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Vector x;
  double objective_value = 0.0;
  double max_constraint_violation = 0.0;
  // Row multipliers (equality rows first, then inequality rows) and the
  // largest sign violation among reduced costs at termination.
  Vector duals;
  double dual_infeasibility = 0.0;
  int iterations = 0;
};

struct LpOptions {
  double feasibility_tol = 1e-8;
  double optimality_tol = 1e-7;
  double pivot_tol = 1e-9;
  int refactor_interval = 50;
  // Consecutive degenerate pivots before switching to Bland's rule.
  int degenerate_switch = 25;
  // 0 selects 50 * (rows + cols) + 10000.
  int max_iterations = 0;
};

// Dense revised simplex on bounded variables. Deterministic for identical
// input. Throws SolverError if the iteration cap is hit.
LpSolution solve_lp(const LinearProgram& lp, const LpOptions& opts = {});

}  // namespace sparselds
