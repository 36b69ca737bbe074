#pragma once

#include <Eigen/Dense>
#include <optional>

namespace sparselds {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative singular-value threshold. When unset, rank decisions use
// max(rows, cols) * machine epsilon. Singular values at or below
// rel * max(sigma_max, scale) count as zero; pass the norm of the inputs as
// `scale` when the matrix is a computed product that may cancel to noise.
using RelTol = std::optional<double>;

// A linear subspace of R^ambient held by an orthonormal basis (ambient x dim).
// A zero-dimensional subspace has an empty (ambient x 0) basis.
class Subspace {
 public:
  explicit Subspace(Eigen::Index ambient = 0);
  // `basis` must already be orthonormal.
  Subspace(Eigen::Index ambient, Matrix basis);

  static Subspace full(Eigen::Index ambient);
  static Subspace zero(Eigen::Index ambient) { return Subspace(ambient); }
  // Orthonormal basis for the column span of `spanning`.
  static Subspace span(const Matrix& spanning, RelTol tol = {}, double scale = 0.0);

  Eigen::Index ambient() const noexcept { return ambient_; }
  Eigen::Index dim() const noexcept { return basis_.cols(); }
  const Matrix& basis() const noexcept { return basis_; }

  // Orthogonal projector onto the subspace.
  Matrix projector() const;
  // Euclidean distance from x to the subspace.
  double distance(const Vector& x) const;

 private:
  Eigen::Index ambient_;
  Matrix basis_;
};

int rank(const Matrix& m, RelTol tol = {}, double scale = 0.0);
Subspace kernel_basis(const Matrix& m, RelTol tol = {}, double scale = 0.0);
Matrix pseudoinverse(const Matrix& m, RelTol tol = {});

// I - M M^+ : orthogonal projector onto the complement of img(M).
Matrix complement_projector(const Matrix& m, RelTol tol = {});

// Default relative cut for image, preimage, sum and intersection.
inline constexpr double kSubspaceTol = 1e-10;

// M V = { M x : x in V }
Subspace subspace_image(const Matrix& m, const Subspace& v, RelTol tol = {});
// M^{-1} V = { x : M x in V }
Subspace subspace_preimage(const Matrix& m, const Subspace& v, RelTol tol = {});
Subspace subspace_sum(const Subspace& u, const Subspace& v, RelTol tol = {});
Subspace subspace_intersection(const Subspace& u, const Subspace& v, RelTol tol = {});
bool subspace_equal(const Subspace& u, const Subspace& v, double tol = 1e-8);
// u ⊆ v, tested as ||(I - P_v) basis_u||_inf < tol.
bool subspace_contains(const Subspace& v, const Subspace& u, double tol = 1e-8);

}  // namespace sparselds
