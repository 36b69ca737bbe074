#include "sparselds/recovery.hpp"

#include <algorithm>
#include <cmath>

#include "sparselds/errors.hpp"

namespace sparselds {

RecoveryResult solve_d1(const BlockOperators& ops, const Vector& y, const LpOptions& opts) {
  const Eigen::Index rows = ops.O.rows();
  if (y.size() != rows) throw DimensionError("Y must have (N+1)p entries");
  const Eigen::Index n = ops.n;
  const Eigen::Index nu = ops.Gamma.cols();

  // Variables: [x0 (free) | U+ >= 0 | U- >= 0], U = U+ - U-.
  LinearProgram lp = LinearProgram::nonnegative(n + 2 * nu);
  lp.c.tail(2 * nu).setOnes();
  lp.lower.head(n).setConstant(-kInf);
  lp.A_eq.resize(rows, n + 2 * nu);
  lp.A_eq << ops.O, ops.Gamma, -ops.Gamma;
  lp.b_eq = y;

  const LpSolution sol = solve_lp(lp, opts);
  RecoveryResult out;
  out.status = sol.status;
  out.x0_hat = sol.x.head(n);
  out.U_hat = sol.x.segment(n, nu) - sol.x.tail(nu);
  out.l1_value = out.U_hat.lpNorm<1>();
  out.residual = rows ? (ops.O * out.x0_hat + ops.Gamma * out.U_hat - y).cwiseAbs().maxCoeff() : 0.0;
  return out;
}

Vector solve_bp(const Matrix& theta, const Vector& y, const LpOptions& opts) {
  if (theta.rows() != y.size()) throw DimensionError("solve_bp: y length != rows of Theta");
  const Eigen::Index m = theta.cols();
  LinearProgram lp = LinearProgram::nonnegative(2 * m);
  lp.c.setOnes();
  lp.A_eq.resize(theta.rows(), 2 * m);
  lp.A_eq << theta, -theta;
  lp.b_eq = y;
  const LpSolution sol = solve_lp(lp, opts);
  if (sol.status != LpStatus::Optimal) {
    throw SolverError(std::string("basis pursuit: ") + to_string(sol.status));
  }
  return sol.x.head(m) - sol.x.tail(m);
}

bool close_rel_inf(const Vector& truth, const Vector& estimate, double tol) {
  if (truth.size() != estimate.size()) return false;
  if (truth.size() == 0) return true;
  const double scale = std::max(1.0, truth.cwiseAbs().maxCoeff());
  return (truth - estimate).cwiseAbs().maxCoeff() <= tol * scale;
}

RecoveryVerdict recovery_success(const Vector& x0, const Vector& inputs, const RecoveryResult& result,
                                 double tol) {
  RecoveryVerdict v;
  if (result.status != LpStatus::Optimal) return v;
  v.input = close_rel_inf(inputs, result.U_hat, tol);
  v.joint = v.input && close_rel_inf(x0, result.x0_hat, tol);
  return v;
}

double coherence(const Matrix& theta) {
  const Vector norms = theta.colwise().norm();
  const double floor = 1e-10 * std::max(1.0, norms.size() ? norms.maxCoeff() : 0.0);
  for (Eigen::Index j = 0; j < norms.size(); ++j) {
    if (norms(j) <= floor) throw DimensionError("coherence: degenerate column " + std::to_string(j));
  }
  const Matrix unit = theta * norms.cwiseInverse().asDiagonal();
  const Matrix gram = unit.transpose() * unit;
  double mu = 0.0;
  for (Eigen::Index i = 0; i < gram.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < gram.cols(); ++j) mu = std::max(mu, std::abs(gram(i, j)));
  }
  return std::min(mu, 1.0);
}

bool sefati_sufficient(const BlockOperators& ops, int s, RelTol tol) {
  if (!observable(ops, tol)) return false;
  if (s <= 0) return true;
  const double bound = 1.0 / (2.0 * ops.horizon * s - 1.0);
  double mu = 1.0;
  try {
    mu = coherence(ops.R);
  } catch (const DimensionError&) {
    // A zero column of Pperp*Gamma is an unrecoverable direction.
    return false;
  }
  return mu < bound;
}

}  // namespace sparselds
