#pragma once

#include <random>

#include <Eigen/Dense>

#include "nhad/biortho.hpp"

namespace nhad::test {

inline AlphaValue static_alpha(Complex alpha) {
  return AlphaValue{alpha, Complex{}, std::abs(alpha), std::arg(alpha), 0.0, 0.0};
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> d;
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(d(rng), d(rng));
  return m;
}

/// Random matrix with condition number below `max_cond`.
inline Matrix well_conditioned(std::mt19937_64& rng, Eigen::Index n, double max_cond = 50.0) {
  for (;;) {
    Matrix m = random_matrix(rng, n);
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    if (s(0) / s(n - 1) < max_cond) return m;
  }
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace nhad::test
