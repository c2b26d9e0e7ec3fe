#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "deimkit/sampling.hpp"
#include "deimkit/types.hpp"

namespace tu {

using deimkit::Index;
using deimkit::Matrix;
using deimkit::Vector;

/// Kahan's upper-triangular example: row i scaled by s^i, unit diagonal with
/// -c above it (s^2 + c^2 = 1). Column-pivoted QR keeps the natural order yet
/// the trailing diagonal entry wildly misjudges the smallest singular value.
inline Matrix kahan(Index n, double c) {
  const double s = std::sqrt(1.0 - c * c);
  Matrix a = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const double scale = std::pow(s, static_cast<double>(i));
    a(i, i) = scale;
    for (Index j = i + 1; j < n; ++j) a(i, j) = -c * scale;
  }
  // tiny decreasing diagonal perturbation so floating-point ties in the
  // column norms cannot trigger accidental pivoting (the classic pert trick)
  const double eps = std::numeric_limits<double>::epsilon();
  for (Index i = 0; i < n; ++i)
    a(i, i) += 25.0 * eps * static_cast<double>(n - i);
  return a;
}

inline Vector singular_values(const Matrix& a) {
  return Eigen::JacobiSVD<Matrix>(a).singularValues();
}

inline double smin(const Matrix& a) {
  Vector sv = singular_values(a);
  return sv(sv.size() - 1);
}

inline double smax(const Matrix& a) {
  return singular_values(a)(0);
}

inline Matrix random_spd(Index m, deimkit::Rng& rng, double shift = 0.5) {
  Matrix b = deimkit::random_normal(m, m, rng);
  return (b * b.transpose() + shift * Matrix::Identity(m, m)).eval();
}

}  // namespace tu
