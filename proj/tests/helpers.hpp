#pragma once

#include <random>

#include "sparselds/lds.hpp"

namespace testutil {

using sparselds::Matrix;
using sparselds::Vector;

inline Matrix gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double sd = 1.0) {
  std::normal_distribution<double> g(0.0, sd);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = g(rng);
  }
  return m;
}

inline Vector gaussian_vec(std::mt19937_64& rng, Eigen::Index n) { return gaussian(rng, n, 1); }

// Integer matrix of rank at most r: product of two small integer factors.
inline Matrix integer_low_rank(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, Eigen::Index r) {
  std::uniform_int_distribution<int> d(-3, 3);
  Matrix a(rows, r), b(r, cols);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = d(rng);
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = d(rng);
  return a * b;
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline sparselds::LinearSystem random_system(std::mt19937_64& rng, int n, int m, int p) {
  return sparselds::LinearSystem(gaussian(rng, n, n, 0.5), gaussian(rng, n, m), gaussian(rng, p, n));
}

}  // namespace testutil
