#pragma once

#include "sparselds/matrixcore.hpp"

namespace sparselds {

// x_{k+1} = A x_k + Psi u_k,  y_k = C x_k
class LinearSystem {
 public:
  LinearSystem(Matrix a, Matrix psi, Matrix c);

  const Matrix& A() const noexcept { return a_; }
  const Matrix& Psi() const noexcept { return psi_; }
  const Matrix& C() const noexcept { return c_; }
  int n() const noexcept { return static_cast<int>(a_.rows()); }
  int m() const noexcept { return static_cast<int>(psi_.cols()); }
  int p() const noexcept { return static_cast<int>(c_.rows()); }

 private:
  Matrix a_;
  Matrix psi_;
  Matrix c_;
};

// Block operators for horizon N. Block vectors are flattened with
// index k*m + i for inputs and k*p + i for outputs.
struct BlockOperators {
  int horizon = 0;
  int n = 0;
  int m = 0;
  int p = 0;
  Matrix O;      // (N+1)p x n, block k = C A^k
  Matrix Gamma;  // (N+1)p x Nm, block (k, j) = C A^{k-1-j} Psi for j < k
  Matrix Pperp;  // I - O O^+
  Matrix R;      // Pperp * Gamma
};

// Returns (y_0, ..., y_N) for U = (u_0, ..., u_{N-1}).
Vector simulate(const LinearSystem& sys, const Vector& x0, const Vector& inputs);

BlockOperators build_operators(const LinearSystem& sys, int horizon, RelTol tol = {});

// rank O_N == n
bool observable(const LinearSystem& sys, int horizon, RelTol tol = {});
bool observable(const BlockOperators& ops, RelTol tol = {});

}  // namespace sparselds
