#include <gtest/gtest.h>

#include "helpers.hpp"
#include "oracles.hpp"
#include "sparselds/errors.hpp"
#include "sparselds/lpsolve.hpp"

using namespace sparselds;
using testutil::gaussian;

namespace {

LinearProgram boxed(const Vector& c, const Matrix& a_ub, const Vector& b_ub, double lo, double hi) {
  LinearProgram lp;
  lp.c = c;
  lp.A_eq = Matrix(0, c.size());
  lp.b_eq = Vector(0);
  lp.A_ub = a_ub;
  lp.b_ub = b_ub;
  lp.lower = Vector::Constant(c.size(), lo);
  lp.upper = Vector::Constant(c.size(), hi);
  return lp;
}

}  // namespace

TEST(SolveLp, MatchesVertexEnumerationOnRandomBoxedPrograms) {
  std::mt19937_64 rng(31);
  int feasible = 0, infeasible = 0;
  for (int t = 0; t < 300; ++t) {
    const int n = testutil::uniform_int(rng, 1, 4);
    const int rows = testutil::uniform_int(rng, 0, 5);
    const int eq = testutil::uniform_int(rng, 0, std::min(n - 1, 2));
    LinearProgram lp = boxed(testutil::gaussian_vec(rng, n), gaussian(rng, rows, n), testutil::gaussian_vec(rng, rows),
                             -2.0, 3.0);
    lp.A_eq = gaussian(rng, eq, n);
    lp.b_eq = testutil::gaussian_vec(rng, eq);
    const auto ref = oracle::lp_vertex_min(lp.c, lp.A_eq, lp.b_eq, lp.A_ub, lp.b_ub, lp.lower, lp.upper);
    const LpSolution sol = solve_lp(lp);
    if (!ref) {
      ++infeasible;
      EXPECT_EQ(sol.status, LpStatus::Infeasible) << "trial " << t;
      continue;
    }
    ++feasible;
    ASSERT_EQ(sol.status, LpStatus::Optimal) << "trial " << t;
    EXPECT_NEAR(sol.objective_value, *ref, 1e-7 * std::max(1.0, std::abs(*ref))) << "trial " << t;
    EXPECT_LE(lp.max_violation(sol.x), 1e-7);
    EXPECT_NEAR(sol.objective_value, lp.c.dot(sol.x), 1e-9);
  }
  EXPECT_GT(feasible, 100);
  EXPECT_GT(infeasible, 0);
}

TEST(SolveLp, UnboundedDetected) {
  // min -x s.t. x - y <= 1, x, y >= 0.
  LinearProgram lp = LinearProgram::nonnegative(2);
  lp.c = (Vector(2) << -1, 0).finished();
  lp.A_ub = (Matrix(1, 2) << 1, -1).finished();
  lp.b_ub = Vector::Ones(1);
  EXPECT_EQ(solve_lp(lp).status, LpStatus::Unbounded);
}

TEST(SolveLp, InfeasibleEqualities) {
  LinearProgram lp = LinearProgram::nonnegative(2);
  lp.c = Vector::Ones(2);
  lp.A_eq = (Matrix(2, 2) << 1, 1, 1, 1).finished();
  lp.b_eq = (Vector(2) << 1, 2).finished();
  EXPECT_EQ(solve_lp(lp).status, LpStatus::Infeasible);
}

TEST(SolveLp, NegativeRhsOnNonnegativeVariables) {
  LinearProgram lp = LinearProgram::nonnegative(2);
  lp.c = Vector::Ones(2);
  lp.A_eq = (Matrix(1, 2) << 1, 1).finished();
  lp.b_eq = (Vector(1) << -1).finished();
  EXPECT_EQ(solve_lp(lp).status, LpStatus::Infeasible);
}

TEST(SolveLp, FreeVariablesAndEqualities) {
  // min |x1| + |x2| written with free x and t >= |x|: x1 + x2 = 3, x1 - x2 = 1.
  LinearProgram lp;
  lp.c = (Vector(4) << 0, 0, 1, 1).finished();
  lp.A_eq = (Matrix(2, 4) << 1, 1, 0, 0, 1, -1, 0, 0).finished();
  lp.b_eq = (Vector(2) << 3, 1).finished();
  lp.A_ub = (Matrix(4, 4) << 1, 0, -1, 0, -1, 0, -1, 0, 0, 1, 0, -1, 0, -1, 0, -1).finished();
  lp.b_ub = Vector::Zero(4);
  lp.lower = (Vector(4) << -kInf, -kInf, 0, 0).finished();
  lp.upper = Vector::Constant(4, kInf);
  const LpSolution sol = solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_NEAR(sol.x(0), 2.0, 1e-9);
  EXPECT_NEAR(sol.x(1), 1.0, 1e-9);
  EXPECT_NEAR(sol.objective_value, 3.0, 1e-9);
}

TEST(SolveLp, BealeCyclingExampleTerminates) {
  // Classic example on which textbook Dantzig pricing cycles.
  LinearProgram lp = LinearProgram::nonnegative(4);
  lp.c = (Vector(4) << -0.75, 150, -0.02, 6).finished();
  lp.A_ub = (Matrix(3, 4) << 0.25, -60, -0.04, 9, 0.5, -90, -0.02, 3, 0, 0, 1, 0).finished();
  lp.b_ub = (Vector(3) << 0, 0, 1).finished();
  const LpSolution sol = solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_NEAR(sol.objective_value, -0.05, 1e-9);
}

TEST(SolveLp, DualsCertifyOptimalityOnStandardForm) {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 30; ++t) {
    const int n = 6, rows = 3;
    LinearProgram lp = LinearProgram::nonnegative(n);
    lp.A_eq = gaussian(rng, rows, n);
    // Feasible by construction, bounded because c > 0.
    lp.b_eq = lp.A_eq * testutil::gaussian_vec(rng, n).cwiseAbs();
    lp.c = testutil::gaussian_vec(rng, n).cwiseAbs().array() + 0.1;
    const LpSolution sol = solve_lp(lp);
    ASSERT_EQ(sol.status, LpStatus::Optimal);
    ASSERT_EQ(sol.duals.size(), rows);
    // Weak duality is tight: b'y = c'x and c - A'y >= 0.
    EXPECT_NEAR(lp.b_eq.dot(sol.duals), sol.objective_value, 1e-7);
    EXPECT_GE((lp.c - lp.A_eq.transpose() * sol.duals).minCoeff(), -1e-7);
    EXPECT_LE(sol.dual_infeasibility, 1e-7);
  }
}

TEST(SolveLp, DeterministicAcrossCalls) {
  std::mt19937_64 rng(33);
  const LinearProgram lp = boxed(testutil::gaussian_vec(rng, 4), gaussian(rng, 3, 4), Vector::Ones(3), -1, 1);
  const LpSolution a = solve_lp(lp), b = solve_lp(lp);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(SolveLp, IterationCapThrows) {
  std::mt19937_64 rng(34);
  LinearProgram lp = boxed(-Vector::Ones(8), gaussian(rng, 8, 8).cwiseAbs(), Vector::Ones(8), 0, kInf);
  LpOptions opts;
  opts.max_iterations = 1;
  EXPECT_THROW(solve_lp(lp, opts), SolverError);
}

TEST(LinearProgram, ValidateRejectsBadShapes) {
  LinearProgram lp = LinearProgram::nonnegative(3);
  lp.A_eq = Matrix::Zero(1, 2);
  lp.b_eq = Vector::Zero(1);
  EXPECT_THROW(lp.validate(), DimensionError);
  LinearProgram bad = LinearProgram::nonnegative(2);
  bad.c(0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(bad.validate(), DimensionError);
}
