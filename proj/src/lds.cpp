#include "sparselds/lds.hpp"

#include <string>
#include <vector>

#include "sparselds/errors.hpp"

namespace sparselds {

LinearSystem::LinearSystem(Matrix a, Matrix psi, Matrix c)
    : a_(std::move(a)), psi_(std::move(psi)), c_(std::move(c)) {
  if (a_.rows() != a_.cols()) throw DimensionError("A must be square");
  if (psi_.rows() != a_.rows()) throw DimensionError("Psi must have n rows");
  if (c_.cols() != a_.rows()) throw DimensionError("C must have n columns");
  if (!a_.allFinite() || !psi_.allFinite() || !c_.allFinite()) {
    throw DimensionError("system matrices must be finite");
  }
}

Vector simulate(const LinearSystem& sys, const Vector& x0, const Vector& inputs) {
  const int n = sys.n(), m = sys.m(), p = sys.p();
  if (x0.size() != n) throw DimensionError("x0 has wrong length");
  if (m == 0 ? inputs.size() != 0 : inputs.size() % m != 0) {
    throw DimensionError("input length is not a multiple of m");
  }
  const int horizon = m == 0 ? 0 : static_cast<int>(inputs.size() / m);
  Vector y((horizon + 1) * p);
  Vector x = x0;
  for (int k = 0; k <= horizon; ++k) {
    y.segment(k * p, p) = sys.C() * x;
    if (k < horizon) x = sys.A() * x + sys.Psi() * inputs.segment(k * m, m);
  }
  return y;
}

BlockOperators build_operators(const LinearSystem& sys, int horizon, RelTol tol) {
  if (horizon < 1) throw DimensionError("horizon must be >= 1, got " + std::to_string(horizon));
  BlockOperators ops;
  ops.horizon = horizon;
  ops.n = sys.n();
  ops.m = sys.m();
  ops.p = sys.p();
  const int n = ops.n, m = ops.m, p = ops.p;

  ops.O.resize((horizon + 1) * p, n);
  Matrix ak = Matrix::Identity(n, n);
  // markov[j] = C A^j Psi
  std::vector<Matrix> markov;
  markov.reserve(horizon);
  for (int k = 0; k <= horizon; ++k) {
    ops.O.middleRows(k * p, p) = sys.C() * ak;
    if (k < horizon) markov.push_back(ops.O.middleRows(k * p, p) * sys.Psi());
    ak = sys.A() * ak;
  }

  ops.Gamma = Matrix::Zero((horizon + 1) * p, horizon * m);
  for (int k = 1; k <= horizon; ++k) {
    for (int j = 0; j < k; ++j) ops.Gamma.block(k * p, j * m, p, m) = markov[k - 1 - j];
  }
  ops.Pperp = complement_projector(ops.O, tol);
  ops.R = ops.Pperp * ops.Gamma;
  return ops;
}

bool observable(const BlockOperators& ops, RelTol tol) { return rank(ops.O, tol) == ops.n; }

bool observable(const LinearSystem& sys, int horizon, RelTol tol) {
  return observable(build_operators(sys, horizon, tol), tol);
}

}  // namespace sparselds
