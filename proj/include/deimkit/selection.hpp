#pragma once

#include <vector>

#include "deimkit/kernels.hpp"

namespace deimkit {

enum class SelectionStrategy { DeimGreedy, Qdeim, Srrqr };

const char* to_string(SelectionStrategy s);
SelectionStrategy selection_strategy_from_string(const std::string& name);

/// Ordered distinct row indices i_1..i_s (0-based in memory, 1-based on the
/// wire) picking columns of the identity, plus the strategy that produced
/// them and the certified kappa = ||(S^T U)^+||_2.
struct SelectionOperator {
  std::vector<Index> indices;
  Index m = 0;
  SelectionStrategy strategy = SelectionStrategy::Srrqr;
  double eta = 0.0;  // srrqr only
  double kappa = 0.0;
};

/// Rows of u picked by the selection: S^T u.
Matrix selected_rows(const Matrix& u, const std::vector<Index>& indices);
Vector selected_entries(const Vector& f, const std::vector<Index>& indices);

/// 1 / sigma_min(S^T u) for a full-column-rank subset.
double subset_kappa(const Matrix& u, const std::vector<Index>& indices);

/// Classic residual-greedy DEIM selection on an orthonormal basis.
SelectionOperator select_deim_greedy(const Matrix& u);

/// First r pivots of column-pivoted QR of u^T.
SelectionOperator select_qdeim(const Matrix& u);

/// sRRQR pivots of u^T; kappa certified <= sqrt(1 + eta^2 r (m-r)).
SelectionOperator select_srrqr(const Matrix& u, double eta = 2.0);

/// Base strategy for the first r indices, then greedy sigma_min growth for
/// the remaining s - r.
SelectionOperator select_oversampled(const Matrix& u, Index s,
                                     SelectionStrategy base, double eta = 2.0);

SelectionOperator select(const Matrix& u, SelectionStrategy strategy,
                         double eta = 2.0);

}  // namespace deimkit
