// Independent reference computations used by the unit and acceptance tests.
// None of these call into the solver or certificate code under test.
#pragma once

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Rational = boost::multiprecision::cpp_rational;

// Exact rank of an integer-valued matrix by fraction-free elimination.
inline int rational_rank(const Matrix& m) {
  const auto rows = static_cast<std::size_t>(m.rows());
  const auto cols = static_cast<std::size_t>(m.cols());
  std::vector<std::vector<Rational>> a(rows, std::vector<Rational>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      a[i][j] = Rational(static_cast<long long>(std::llround(m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))));
    }
  }
  int r = 0;
  for (std::size_t c = 0; c < cols && static_cast<std::size_t>(r) < rows; ++c) {
    std::size_t piv = static_cast<std::size_t>(r);
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[static_cast<std::size_t>(r)]);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == static_cast<std::size_t>(r) || a[i][c] == 0) continue;
      const Rational f = a[i][c] / a[static_cast<std::size_t>(r)][c];
      for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[static_cast<std::size_t>(r)][j];
    }
    ++r;
  }
  return r;
}

// Calls fn(subset) for every k-subset of {0..n-1} in lexicographic order.
inline void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  if (k < 0 || k > n) return;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

// Solves the square system M x = b when M is well conditioned.
inline std::optional<Vector> solve_square(const Matrix& m, const Vector& b) {
  Eigen::FullPivLU<Matrix> lu(m);
  lu.setThreshold(1e-10);
  if (!lu.isInvertible()) return std::nullopt;
  return Vector(lu.solve(b));
}

// min c'x s.t. E x = e, G x <= g, lo <= x <= hi with finite bounds, by
// enumerating every vertex. Returns nullopt when infeasible.
inline std::optional<double> lp_vertex_min(const Vector& c, const Matrix& e_mat, const Vector& e, const Matrix& g_mat,
                                           const Vector& g, const Vector& lo, const Vector& hi) {
  const Eigen::Index n = c.size();
  const Eigen::Index k = e_mat.rows();
  // Inequalities: G rows, then x_i <= hi_i, then -x_i <= -lo_i.
  Matrix ineq(g_mat.rows() + 2 * n, n);
  Vector rhs(g_mat.rows() + 2 * n);
  ineq << g_mat, Matrix::Identity(n, n), -Matrix::Identity(n, n);
  rhs << g, hi, -lo;
  std::optional<double> best;
  const int need = static_cast<int>(n - k);
  for_each_subset(static_cast<int>(ineq.rows()), need, [&](const std::vector<int>& active) {
    Matrix sys(n, n);
    Vector b(n);
    sys.topRows(k) = e_mat;
    b.head(k) = e;
    for (int t = 0; t < need; ++t) {
      sys.row(k + t) = ineq.row(active[static_cast<std::size_t>(t)]);
      b(k + t) = rhs(active[static_cast<std::size_t>(t)]);
    }
    const auto x = solve_square(sys, b);
    if (!x) return;
    if (k > 0 && (e_mat * *x - e).cwiseAbs().maxCoeff() > 1e-7) return;
    if ((ineq * *x - rhs).maxCoeff() > 1e-7) return;
    const double v = c.dot(*x);
    if (!best || v < *best) best = v;
  });
  return best;
}

// Sum of the s largest |h_i| divided by ||h||_1.
inline double top_s_ratio(const Vector& h, int s) {
  std::vector<double> a(static_cast<std::size_t>(h.size()));
  for (Eigen::Index i = 0; i < h.size(); ++i) a[static_cast<std::size_t>(i)] = std::abs(h(i));
  std::sort(a.begin(), a.end(), std::greater<>());
  double top = 0.0, total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    total += a[i];
    if (static_cast<int>(i) < s) top += a[i];
  }
  return total > 0.0 ? top / total : 0.0;
}

// Orthonormal basis for the null space of M (columns), via full SVD.
inline Matrix null_basis(const Matrix& m, double rel = 1e-10) {
  if (m.rows() == 0) return Matrix::Identity(m.cols(), m.cols());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = rel * (sv.size() ? std::max(sv(0), 1.0) : 1.0);
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > cut) ++r;
  return svd.matrixV().rightCols(m.cols() - r);
}

// nsc of span(basis) for uniform s-sparsity, by visiting every vertex of
// { h in K : ||h||_1 <= 1 }. A vertex has d-1 zero coordinates, so the
// one-dimensional slices K ∩ {h_Z = 0}, |Z| = d-1, cover them all.
inline double nsc_vertex_enum(const Matrix& basis, int s) {
  const Eigen::Index m = basis.rows();
  const Eigen::Index d = basis.cols();
  if (d == 0 || s <= 0) return 0.0;
  double best = 0.0;
  for_each_subset(static_cast<int>(m), static_cast<int>(d - 1), [&](const std::vector<int>& zeros) {
    Matrix rows(static_cast<Eigen::Index>(zeros.size()), d);
    for (std::size_t t = 0; t < zeros.size(); ++t) rows.row(static_cast<Eigen::Index>(t)) = basis.row(zeros[t]);
    const Matrix z = null_basis(rows);
    if (z.cols() != 1) return;
    best = std::max(best, top_s_ratio(basis * z.col(0), s));
  });
  return best;
}

// Largest top-s ratio over `samples` Gaussian combinations of the basis.
inline double nsc_random_lower_bound(const Matrix& basis, int s, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  double best = 0.0;
  Vector z(basis.cols());
  for (int t = 0; t < samples; ++t) {
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = g(rng);
    best = std::max(best, top_s_ratio(basis * z, s));
  }
  return best;
}

// min ||x||_1 s.t. Theta x = y for full-row-rank Theta: the optimum is a basic
// solution, so try every nonsingular set of rows(Theta) columns.
inline std::optional<double> bp_basic_min(const Matrix& theta, const Vector& y) {
  const auto rows = theta.rows();
  std::optional<double> best;
  for_each_subset(static_cast<int>(theta.cols()), static_cast<int>(rows), [&](const std::vector<int>& cols) {
    Matrix sub(rows, rows);
    for (std::size_t t = 0; t < cols.size(); ++t) sub.col(static_cast<Eigen::Index>(t)) = theta.col(cols[t]);
    const auto x = solve_square(sub, y);
    if (!x) return;
    const double v = x->lpNorm<1>();
    if (!best || v < *best) best = v;
  });
  return best;
}

// [C; CA; ...; CA^{n-1}]
inline Matrix kalman_observability(const Matrix& a, const Matrix& c) {
  const Eigen::Index n = a.rows();
  Matrix out(c.rows() * n, n);
  Matrix blk = c;
  for (Eigen::Index k = 0; k < n; ++k) {
    out.middleRows(k * c.rows(), c.rows()) = blk;
    blk = blk * a;
  }
  return out;
}

// Step-by-step simulation written independently of the block operators.
inline Vector step_simulate(const Matrix& a, const Matrix& psi, const Matrix& c, const Vector& x0, const Vector& u) {
  const Eigen::Index m = psi.cols();
  const Eigen::Index p = c.rows();
  const Eigen::Index horizon = m ? u.size() / m : 0;
  Vector y((horizon + 1) * p);
  Vector x = x0;
  for (Eigen::Index k = 0; k <= horizon; ++k) {
    y.segment(k * p, p) = c * x;
    if (k < horizon) x = a * x + psi * u.segment(k * m, m);
  }
  return y;
}

}  // namespace oracle
