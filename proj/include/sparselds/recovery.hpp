#pragma once

#include "sparselds/lds.hpp"
#include "sparselds/lpsolve.hpp"

namespace sparselds {

struct RecoveryResult {
  LpStatus status = LpStatus::Infeasible;
  Vector x0_hat;
  Vector U_hat;
  double l1_value = 0.0;
  // ||O x0_hat + Gamma U_hat - Y||_inf
  double residual = 0.0;
};

// min ||U||_1  s.t.  O x0 + Gamma U = Y,  x0 free.
RecoveryResult solve_d1(const BlockOperators& ops, const Vector& y, const LpOptions& opts = {});

// min ||x||_1  s.t.  Theta x = y. Throws SolverError if the program is infeasible.
Vector solve_bp(const Matrix& theta, const Vector& y, const LpOptions& opts = {});

struct RecoveryVerdict {
  bool joint = false;
  bool input = false;
};

inline constexpr double kRecoveryTol = 1e-4;

// Relative sup-norm comparison: ||a - b||_inf <= tol * max(1, ||a||_inf).
bool close_rel_inf(const Vector& truth, const Vector& estimate, double tol);

RecoveryVerdict recovery_success(const Vector& x0, const Vector& inputs, const RecoveryResult& result,
                                 double tol = kRecoveryTol);

// Largest absolute cosine between distinct columns. Throws DimensionError on
// a column with norm <= 1e-12.
double coherence(const Matrix& theta);

// Coherence bound: rank O_N = n and mu(Pperp Gamma) < 1/(2Ns - 1).
bool sefati_sufficient(const BlockOperators& ops, int s, RelTol tol = {});

}  // namespace sparselds
