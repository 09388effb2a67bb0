#pragma once

#include <cmath>
#include <random>

#include "qalloc/qcore.hpp"

namespace qalloc::fixtures {

inline Matrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = Complex(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

inline DensityMatrix random_state(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = Complex(g(rng), g(rng));
  Matrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(rho);
}

inline Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline Matrix diag_pm(std::initializer_list<double> signs) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(signs.size()), static_cast<Eigen::Index>(signs.size()));
  Eigen::Index i = 0;
  for (double s : signs) m(i, i) = s, ++i;
  return m;
}

}  // namespace qalloc::fixtures
