#include "sparselds/matrixcore.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <limits>

#include "sparselds/errors.hpp"

namespace sparselds {
namespace {

double rel_threshold(const Matrix& m, RelTol tol) {
  if (tol) return *tol;
  return static_cast<double>(std::max(m.rows(), m.cols())) *
         std::numeric_limits<double>::epsilon();
}

int count_above(const Vector& sigma, double rel, double scale) {
  if (sigma.size() == 0 || sigma(0) <= 0.0) return 0;
  const double cut = rel * std::max(sigma(0), scale);
  int r = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cut) ++r;
  }
  return r;
}

// Products of bases carry rounding noise well above max(r, c) * eps, so the
// subspace algebra uses a fixed relative cut unless told otherwise.
RelTol derived(RelTol tol) { return tol ? tol : RelTol(kSubspaceTol); }

}  // namespace

Subspace::Subspace(Eigen::Index ambient) : ambient_(ambient), basis_(ambient, 0) {}

Subspace::Subspace(Eigen::Index ambient, Matrix basis)
    : ambient_(ambient), basis_(std::move(basis)) {
  if (basis_.rows() != ambient_) {
    throw DimensionError("subspace basis rows do not match ambient dimension");
  }
}

Subspace Subspace::full(Eigen::Index ambient) {
  return Subspace(ambient, Matrix::Identity(ambient, ambient));
}

Subspace Subspace::span(const Matrix& spanning, RelTol tol, double scale) {
  const Eigen::Index amb = spanning.rows();
  if (spanning.cols() == 0 || amb == 0) return Subspace(amb);
  Eigen::BDCSVD<Matrix> svd(spanning, Eigen::ComputeThinU);
  const int r = count_above(svd.singularValues(), rel_threshold(spanning, tol), scale);
  return Subspace(amb, svd.matrixU().leftCols(r));
}

Matrix Subspace::projector() const { return basis_ * basis_.transpose(); }

double Subspace::distance(const Vector& x) const {
  return (x - basis_ * (basis_.transpose() * x)).norm();
}

int rank(const Matrix& m, RelTol tol, double scale) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<Matrix> svd(m);
  return count_above(svd.singularValues(), rel_threshold(m, tol), scale);
}

Subspace kernel_basis(const Matrix& m, RelTol tol, double scale) {
  const Eigen::Index cols = m.cols();
  if (cols == 0) return Subspace(0);
  if (m.rows() == 0) return Subspace::full(cols);
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const int r = count_above(svd.singularValues(), rel_threshold(m, tol), scale);
  return Subspace(cols, svd.matrixV().rightCols(cols - r));
}

Matrix pseudoinverse(const Matrix& m, RelTol tol) {
  if (m.size() == 0) return Matrix::Zero(m.cols(), m.rows());
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const int r = count_above(sigma, rel_threshold(m, tol), 0.0);
  const Matrix v = svd.matrixV().leftCols(r);
  const Matrix u = svd.matrixU().leftCols(r);
  return v * sigma.head(r).cwiseInverse().asDiagonal() * u.transpose();
}

Matrix complement_projector(const Matrix& m, RelTol tol) {
  const Subspace img = Subspace::span(m, tol);
  return Matrix::Identity(m.rows(), m.rows()) - img.projector();
}

Subspace subspace_image(const Matrix& m, const Subspace& v, RelTol tol) {
  if (m.cols() != v.ambient()) throw DimensionError("subspace_image: shape mismatch");
  if (v.dim() == 0) return Subspace(m.rows());
  return Subspace::span(m * v.basis(), derived(tol), m.norm());
}

Subspace subspace_preimage(const Matrix& m, const Subspace& v, RelTol tol) {
  if (m.rows() != v.ambient()) throw DimensionError("subspace_preimage: shape mismatch");
  if (v.dim() == 0) return kernel_basis(m, derived(tol));
  // x-part of ker [M, -B_V]; the map to x is injective since B_V has full rank.
  Matrix stacked(m.rows(), m.cols() + v.dim());
  stacked << m, -v.basis();
  const Subspace coeffs = kernel_basis(stacked, derived(tol));
  if (coeffs.dim() == 0) return Subspace(m.cols());
  return Subspace::span(coeffs.basis().topRows(m.cols()), derived(tol));
}

Subspace subspace_sum(const Subspace& u, const Subspace& v, RelTol tol) {
  if (u.ambient() != v.ambient()) throw DimensionError("subspace_sum: ambient mismatch");
  Matrix both(u.ambient(), u.dim() + v.dim());
  both << u.basis(), v.basis();
  return Subspace::span(both, derived(tol));
}

Subspace subspace_intersection(const Subspace& u, const Subspace& v, RelTol tol) {
  if (u.ambient() != v.ambient()) {
    throw DimensionError("subspace_intersection: ambient mismatch");
  }
  if (u.dim() == 0 || v.dim() == 0) return Subspace(u.ambient());
  Matrix stacked(u.ambient(), u.dim() + v.dim());
  stacked << u.basis(), -v.basis();
  const Subspace coeffs = kernel_basis(stacked, derived(tol));
  if (coeffs.dim() == 0) return Subspace(u.ambient());
  return Subspace::span(u.basis() * coeffs.basis().topRows(u.dim()), derived(tol));
}

bool subspace_contains(const Subspace& v, const Subspace& u, double tol) {
  if (u.ambient() != v.ambient()) return false;
  if (u.dim() == 0) return true;
  const Matrix resid = u.basis() - v.basis() * (v.basis().transpose() * u.basis());
  return resid.cwiseAbs().maxCoeff() < tol;
}

bool subspace_equal(const Subspace& u, const Subspace& v, double tol) {
  return u.ambient() == v.ambient() && u.dim() == v.dim() && subspace_contains(v, u, tol);
}

}  // namespace sparselds
