#pragma once

#include <memory>

#include "deimkit/weighting.hpp"

namespace deimkit {

/// Truncation request: either an explicit rank or an energy tolerance tau on
/// the discarded singular-value tail, sqrt(sum_{j>r} s_j^2 / sum_j s_j^2) <= tau.
struct RankSpec {
  static RankSpec fixed(Index r) { return RankSpec{r, 0.0}; }
  static RankSpec energy(double tau) { return RankSpec{0, tau}; }
  bool is_fixed() const { return rank > 0; }
  Index rank = 0;
  double tol = 0.0;
};

/// W-orthonormal POD basis. u_hat = F^{-T} u_euclid with W = F F^T, so
/// u_hat^T W u_hat = I and F^T u_hat = u_euclid.
struct PodBasis {
  Matrix u_hat;    // m x r, W-orthonormal
  Matrix u_euclid; // m x r, Euclidean-orthonormal
  Vector sigma;    // all singular values of F^T Y (retained and discarded)
  Index rank = 0;
  WeightPtr weight;
};

Index rank_select(const Vector& sigma, double tol);

/// Weighted POD via the factor route: thin SVD of F^T Y.
PodBasis pod_basis(const Matrix& y, WeightPtr w, RankSpec spec);

/// GSVD route: weighted QR Y = Q_Y R_Y with Q_Y^T W Q_Y = I, then SVD of R_Y.
PodBasis pod_basis_gsvd(const Matrix& y, WeightPtr w, RankSpec spec);

/// Modified Gram-Schmidt in the W inner product with one unconditional
/// re-orthogonalization pass. Returns (Q, R) with Q^T W Q = I and Q R = Y.
std::pair<Matrix, Matrix> weighted_qr(const Matrix& y, const WeightOperator& w);

/// W-orthogonal projection P f = U_hat U_hat^T W f.
Vector pod_project(const PodBasis& basis, const Vector& f);

}  // namespace deimkit
