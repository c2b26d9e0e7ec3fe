#pragma once

#include <memory>
#include <vector>

#include "deimkit/kernels.hpp"
#include "deimkit/types.hpp"

namespace deimkit {

enum class WeightKind { Identity, Diagonal, SparseSpd, DenseSpd };

const char* to_string(WeightKind k);

/// Symmetric positive definite inner-product matrix W with a cached
/// factorization W = F F^T, F = Pi * L (L lower triangular, Pi a permutation;
/// Pi = I except for the sparse kind). Immutable after construction.
class WeightOperator {
 public:
  static WeightOperator identity(Index m);
  static WeightOperator diagonal(Vector d);
  static WeightOperator sparse_spd(SparseMatrix w);
  static WeightOperator dense_spd(const Matrix& w);

  WeightKind kind() const { return kind_; }
  Index dim() const { return dim_; }

  Vector apply(const Vector& v) const;   // W v
  Matrix apply(const Matrix& x) const;   // W X
  Vector solve(const Vector& v) const;   // W^{-1} v

  // actions of the factor F (the "L" of W = L L^T, permutation folded in)
  Matrix factor_t_apply(const Matrix& x) const;  // F^T X
  Matrix factor_apply(const Matrix& x) const;    // F X
  Matrix factor_t_solve(const Matrix& x) const;  // F^{-T} X
  Matrix factor_solve(const Matrix& x) const;    // F^{-1} X
  Vector factor_column(Index j) const;           // j-th column of F
  /// Row i of F^T as a dense vector (sparse for sparse kinds, but returned
  /// dense; used to form S^T L^T sampling rows).
  Vector factor_t_row(Index i) const;

  const std::vector<Index>& factor_perm() const { return perm_; }
  /// Dense copy of the triangular factor L (permutation excluded).
  Matrix factor_dense() const;
  Matrix dense() const;  // dense copy of W
  const SparseMatrix& sparse_matrix() const;  // SparseSpd kind only

  double w_inner(const Vector& u, const Vector& v) const;
  double w_norm(const Vector& u) const;
  double w_operator_norm(const Matrix& m) const;

  Vector delta() const;  // sqrt(diag W)
  double diag_entry(Index i) const;

  double condition_estimate() const;

  /// Threshold below which the sparse kind densifies for condition
  /// estimation; above it a power iteration on W and W^{-1} is used.
  void set_densify_threshold(Index t) { densify_threshold_ = t; }

 private:
  WeightOperator() = default;

  WeightKind kind_ = WeightKind::Identity;
  Index dim_ = 0;
  Vector diag_;           // Diagonal kind
  SparseMatrix sparse_;   // SparseSpd kind (full symmetric pattern)
  Matrix dense_;          // DenseSpd kind
  // cached factor
  Vector diag_l_;             // Diagonal: sqrt(diag)
  SparseMatrix sparse_l_;     // SparseSpd: lower triangular factor of permuted W
  Matrix dense_l_;            // DenseSpd
  std::vector<Index> perm_;   // SparseSpd: RCM ordering; else identity
  std::vector<Index> iperm_;  // inverse permutation
  Index densify_threshold_ = 2000;
};

using WeightPtr = std::shared_ptr<const WeightOperator>;

double w_inner(const Vector& u, const Vector& v, const WeightOperator& w);
double w_norm(const Vector& u, const WeightOperator& w);
double w_operator_norm(const Matrix& m, const WeightOperator& w);

/// (L, perm) with Pi^T W Pi = L L^T; dense L for test and diagnostic use.
std::pair<Matrix, std::vector<Index>> factorize(const WeightOperator& w);

/// Van der Sluis equilibration: delta = sqrt(diag W), W_s = D^-1 W D^-1.
std::pair<Vector, WeightOperator> equilibrate(const WeightOperator& w);

double condition_estimate(const WeightOperator& w);

/// Reverse Cuthill-McKee ordering of a symmetric sparsity pattern.
std::vector<Index> reverse_cuthill_mckee(const SparseMatrix& w);

}  // namespace deimkit
