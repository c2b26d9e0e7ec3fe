#pragma once

#include <vector>

#include "deimkit/types.hpp"

namespace deimkit {

/// QR with Businger-Golub column pivoting. q has orthonormal columns
/// (m x k, k = min(m,n)), r is k x n upper trapezoidal, and
/// a(:, perm) = q * r. The diagonal of r has non-increasing magnitudes.
struct PivotedQr {
  Matrix q;
  Matrix r;
  std::vector<Index> perm;  // 0-based column indices
};

/// Strong rank-revealing QR certificate: max |R11^{-1} R12| <= eta holds on
/// return, and sigma_min(R11) is within the 1/sqrt(1 + eta^2 r(n-r)) factor
/// of sigma_r(a).
struct SrrqrResult {
  PivotedQr pivoted_qr;
  Index target_rank = 0;
  double eta = 2.0;
  int swap_count = 0;
};

struct ThinSvd {
  Matrix u;
  Vector sigma;  // non-increasing, non-negative
  Matrix v;
};

struct CholeskyResult {
  Matrix l;                 // lower triangular, Pi^T W Pi = l l^T
  std::vector<Index> perm;  // identity when pivoting is off
};

PivotedQr qr_column_pivoted(const Matrix& a);

/// Gu-Eisenstat style sRRQR with tuning parameter eta >= 1. Handles both the
/// tall case (target_rank < cols) and the wide full-row-rank case
/// (rows < cols, target_rank = rows) via the simplified column-swapping loop.
SrrqrResult srrqr(const Matrix& a, Index target_rank, double eta);

ThinSvd thin_svd(const Matrix& a);

CholeskyResult cholesky(const Matrix& w, bool pivoted = false);

/// Acute principal angles between the column spans of two orthonormal
/// matrices, in non-decreasing order.
Vector principal_angles(const Matrix& basis_a, const Matrix& basis_b);

enum class Triangle { Lower, Upper };

Matrix solve_triangular(const Matrix& factor, Triangle tri, bool transpose,
                        const Matrix& rhs);

/// Least-squares solve a^+ * rhs for full-column-rank a (cols <= rows).
Matrix pinv_apply(const Matrix& a, const Matrix& rhs);

/// sigma_max / sigma_min of a full-rank matrix.
double spectral_condition(const Matrix& a);

double spectral_norm(const Matrix& a);

/// ||Q^T Q - I||_F <= tol check used by all orthonormal-input preconditions.
bool is_orthonormal(const Matrix& q, double tol = 1e-8);

/// Plain Householder QR without pivoting; r is min(m,n) x n.
void householder_qr(const Matrix& a, Matrix* q, Matrix& r);

}  // namespace deimkit
