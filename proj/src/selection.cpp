#include "deimkit/selection.hpp"

#include <algorithm>
#include <cmath>

namespace deimkit {

const char* to_string(SelectionStrategy s) {
  switch (s) {
    case SelectionStrategy::DeimGreedy: return "deim";
    case SelectionStrategy::Qdeim: return "qdeim";
    case SelectionStrategy::Srrqr: return "srrqr";
  }
  return "unknown";
}

SelectionStrategy selection_strategy_from_string(const std::string& name) {
  if (name == "deim") return SelectionStrategy::DeimGreedy;
  if (name == "qdeim") return SelectionStrategy::Qdeim;
  if (name == "srrqr") return SelectionStrategy::Srrqr;
  throw ConfigError("unknown selection strategy: " + name);
}

Matrix selected_rows(const Matrix& u, const std::vector<Index>& indices) {
  Matrix out(static_cast<Index>(indices.size()), u.cols());
  for (size_t i = 0; i < indices.size(); ++i) out.row(static_cast<Index>(i)) = u.row(indices[i]);
  return out;
}

Vector selected_entries(const Vector& f, const std::vector<Index>& indices) {
  Vector out(static_cast<Index>(indices.size()));
  for (size_t i = 0; i < indices.size(); ++i) out(static_cast<Index>(i)) = f(indices[i]);
  return out;
}

double subset_kappa(const Matrix& u, const std::vector<Index>& indices) {
  Vector sv = thin_svd(selected_rows(u, indices)).sigma;
  const double smin = sv(sv.size() - 1);
  if (smin <= 0.0)
    throw NumericalError("selection: S^T U is rank deficient");
  return 1.0 / smin;
}

namespace {

void check_basis(const Matrix& u) {
  require_finite(u, "selection");
  if (!is_orthonormal(u))
    throw ConfigError("selection: basis must have orthonormal columns");
}

Index argmax_abs(const Vector& v) {
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(best))) best = i;
  return best;
}

}  // namespace

SelectionOperator select_deim_greedy(const Matrix& u) {
  check_basis(u);
  const Index r = u.cols();
  SelectionOperator sel;
  sel.m = u.rows();
  sel.strategy = SelectionStrategy::DeimGreedy;
  sel.indices.push_back(argmax_abs(u.col(0)));
  for (Index j = 1; j < r; ++j) {
    Matrix uj = u.leftCols(j);
    Matrix sub = selected_rows(uj, sel.indices);
    Vector rhs = selected_entries(u.col(j), sel.indices);
    Vector c = sub.partialPivLu().solve(rhs);
    if (!c.allFinite())
      throw NumericalError("select_deim_greedy: singular interpolation system at step " +
                           std::to_string(j + 1));
    Vector residual = u.col(j) - uj * c;
    sel.indices.push_back(argmax_abs(residual));
  }
  sel.kappa = subset_kappa(u, sel.indices);
  return sel;
}

SelectionOperator select_qdeim(const Matrix& u) {
  check_basis(u);
  PivotedQr qr = qr_column_pivoted(u.transpose());
  SelectionOperator sel;
  sel.m = u.rows();
  sel.strategy = SelectionStrategy::Qdeim;
  sel.indices.assign(qr.perm.begin(), qr.perm.begin() + u.cols());
  sel.kappa = subset_kappa(u, sel.indices);
  return sel;
}

SelectionOperator select_srrqr(const Matrix& u, double eta) {
  check_basis(u);
  const Index r = u.cols();
  const Index m = u.rows();
  SrrqrResult res = srrqr(u.transpose(), r, eta);
  SelectionOperator sel;
  sel.m = m;
  sel.strategy = SelectionStrategy::Srrqr;
  sel.eta = eta;
  sel.indices.assign(res.pivoted_qr.perm.begin(), res.pivoted_qr.perm.begin() + r);
  sel.kappa = subset_kappa(u, sel.indices);
  const double bound =
      std::sqrt(1.0 + eta * eta * static_cast<double>(r) * static_cast<double>(m - r));
  if (sel.kappa > bound * (1.0 + 1e-10))
    throw NumericalError("select_srrqr: certified bound violated, kappa = " +
                         std::to_string(sel.kappa) + " > " + std::to_string(bound));
  return sel;
}

SelectionOperator select(const Matrix& u, SelectionStrategy strategy, double eta) {
  switch (strategy) {
    case SelectionStrategy::DeimGreedy: return select_deim_greedy(u);
    case SelectionStrategy::Qdeim: return select_qdeim(u);
    case SelectionStrategy::Srrqr: return select_srrqr(u, eta);
  }
  throw ConfigError("select: unknown strategy");
}

SelectionOperator select_oversampled(const Matrix& u, Index s,
                                     SelectionStrategy base, double eta) {
  check_basis(u);
  const Index r = u.cols();
  const Index m = u.rows();
  if (s < r) throw ConfigError("select_oversampled: s must be >= basis rank");
  if (s > m) throw ConfigError("select_oversampled: s exceeds ambient dimension");
  SelectionOperator sel = select(u, base, eta);
  std::vector<bool> used(static_cast<size_t>(m), false);
  for (Index i : sel.indices) used[static_cast<size_t>(i)] = true;
  while (static_cast<Index>(sel.indices.size()) < s) {
    Index best = -1;
    double best_smin = -1.0;
    std::vector<Index> candidate = sel.indices;
    candidate.push_back(0);
    for (Index i = 0; i < m; ++i) {
      if (used[static_cast<size_t>(i)]) continue;
      candidate.back() = i;
      Vector sv = thin_svd(selected_rows(u, candidate)).sigma;
      const double smin = sv(sv.size() - 1);
      if (smin > best_smin) {
        best_smin = smin;
        best = i;
      }
    }
    sel.indices.push_back(best);
    used[static_cast<size_t>(best)] = true;
  }
  sel.kappa = subset_kappa(u, sel.indices);
  return sel;
}

}  // namespace deimkit
