#include "deimkit/weighting.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace deimkit {

const char* to_string(WeightKind k) {
  switch (k) {
    case WeightKind::Identity: return "identity";
    case WeightKind::Diagonal: return "diagonal";
    case WeightKind::SparseSpd: return "sparse";
    case WeightKind::DenseSpd: return "dense";
  }
  return "unknown";
}

std::vector<Index> reverse_cuthill_mckee(const SparseMatrix& w) {
  const Index m = w.rows();
  std::vector<std::vector<Index>> adj(static_cast<size_t>(m));
  for (Index k = 0; k < w.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(w, k); it; ++it)
      if (it.row() != it.col()) adj[static_cast<size_t>(it.col())].push_back(it.row());
  for (auto& nbrs : adj) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
  std::vector<Index> degree(static_cast<size_t>(m));
  for (Index i = 0; i < m; ++i) degree[static_cast<size_t>(i)] = static_cast<Index>(adj[static_cast<size_t>(i)].size());

  std::vector<bool> visited(static_cast<size_t>(m), false);
  std::vector<Index> order;
  order.reserve(static_cast<size_t>(m));
  auto by_degree = [&](Index a, Index b) {
    return degree[static_cast<size_t>(a)] != degree[static_cast<size_t>(b)]
               ? degree[static_cast<size_t>(a)] < degree[static_cast<size_t>(b)]
               : a < b;
  };
  for (Index start = 0; start < m; ++start) {
    // next unvisited vertex of minimum degree
    Index seed = -1;
    for (Index i = 0; i < m; ++i)
      if (!visited[static_cast<size_t>(i)] && (seed < 0 || by_degree(i, seed))) seed = i;
    if (seed < 0) break;
    std::queue<Index> frontier;
    frontier.push(seed);
    visited[static_cast<size_t>(seed)] = true;
    while (!frontier.empty()) {
      Index v = frontier.front();
      frontier.pop();
      order.push_back(v);
      std::vector<Index> next;
      for (Index nb : adj[static_cast<size_t>(v)])
        if (!visited[static_cast<size_t>(nb)]) {
          visited[static_cast<size_t>(nb)] = true;
          next.push_back(nb);
        }
      std::sort(next.begin(), next.end(), by_degree);
      for (Index nb : next) frontier.push(nb);
    }
    start = -1;  // restart scan; visited guards repeats
    if (order.size() == static_cast<size_t>(m)) break;
  }
  std::reverse(order.begin(), order.end());
  return order;
}

namespace {

void check_spd_input_symmetry(double asym, double scale, const char* what) {
  if (scale > 0.0 && asym > 1e-6 * scale)
    throw ConfigError(std::string(what) + ": asymmetric beyond 1e-6 relative");
}

}  // namespace

WeightOperator WeightOperator::identity(Index m) {
  if (m < 1) throw ConfigError("WeightOperator: dimension must be >= 1");
  WeightOperator w;
  w.kind_ = WeightKind::Identity;
  w.dim_ = m;
  return w;
}

WeightOperator WeightOperator::diagonal(Vector d) {
  if (d.size() < 1) throw ConfigError("WeightOperator: dimension must be >= 1");
  for (Index i = 0; i < d.size(); ++i)
    if (!(d(i) > 0.0) || !std::isfinite(d(i)))
      throw ConfigError("WeightOperator: diagonal entries must be positive (entry " +
                        std::to_string(i + 1) + ")");
  WeightOperator w;
  w.kind_ = WeightKind::Diagonal;
  w.dim_ = d.size();
  w.diag_l_ = d.cwiseSqrt();
  w.diag_ = std::move(d);
  return w;
}

WeightOperator WeightOperator::sparse_spd(SparseMatrix ws) {
  if (ws.rows() != ws.cols()) throw ConfigError("WeightOperator: matrix not square");
  if (ws.rows() < 1) throw ConfigError("WeightOperator: dimension must be >= 1");
  ws.makeCompressed();
  SparseMatrix wt = ws.transpose();
  check_spd_input_symmetry((ws - wt).norm(), ws.norm(), "WeightOperator(sparse)");
  WeightOperator w;
  w.kind_ = WeightKind::SparseSpd;
  w.dim_ = ws.rows();
  w.sparse_ = 0.5 * (ws + wt);
  w.perm_ = reverse_cuthill_mckee(w.sparse_);
  w.iperm_.assign(static_cast<size_t>(w.dim_), 0);
  for (Index i = 0; i < w.dim_; ++i)
    w.iperm_[static_cast<size_t>(w.perm_[static_cast<size_t>(i)])] = i;
  // permuted matrix Wp(i,j) = W(perm[i], perm[j])
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(w.sparse_.nonZeros()));
  for (Index k = 0; k < w.sparse_.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(w.sparse_, k); it; ++it)
      trips.emplace_back(w.iperm_[static_cast<size_t>(it.row())],
                         w.iperm_[static_cast<size_t>(it.col())], it.value());
  SparseMatrix wp(w.dim_, w.dim_);
  wp.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::NaturalOrdering<int>> llt;
  llt.compute(wp);
  if (llt.info() != Eigen::Success)
    throw NumericalError("WeightOperator: sparse Cholesky failed (not positive definite)");
  w.sparse_l_ = llt.matrixL();
  w.sparse_l_.makeCompressed();
  return w;
}

WeightOperator WeightOperator::dense_spd(const Matrix& wd) {
  if (wd.rows() != wd.cols()) throw ConfigError("WeightOperator: matrix not square");
  if (wd.rows() < 1) throw ConfigError("WeightOperator: dimension must be >= 1");
  WeightOperator w;
  w.kind_ = WeightKind::DenseSpd;
  w.dim_ = wd.rows();
  w.dense_ = 0.5 * (wd + wd.transpose());
  check_spd_input_symmetry((wd - wd.transpose()).norm(), wd.norm(), "WeightOperator(dense)");
  w.dense_l_ = cholesky(w.dense_, /*pivoted=*/false).l;
  return w;
}

Vector WeightOperator::apply(const Vector& v) const {
  if (v.size() != dim_) throw ConfigError("WeightOperator::apply: dimension mismatch");
  switch (kind_) {
    case WeightKind::Identity: return v;
    case WeightKind::Diagonal: return diag_.cwiseProduct(v);
    case WeightKind::SparseSpd: return sparse_ * v;
    case WeightKind::DenseSpd: return dense_ * v;
  }
  return v;
}

Matrix WeightOperator::apply(const Matrix& x) const {
  if (x.rows() != dim_) throw ConfigError("WeightOperator::apply: dimension mismatch");
  switch (kind_) {
    case WeightKind::Identity: return x;
    case WeightKind::Diagonal: return diag_.asDiagonal() * x;
    case WeightKind::SparseSpd: return sparse_ * x;
    case WeightKind::DenseSpd: return dense_ * x;
  }
  return x;
}

Vector WeightOperator::solve(const Vector& v) const {
  return factor_t_solve(factor_solve(v));
}

Matrix WeightOperator::factor_t_apply(const Matrix& x) const {
  if (x.rows() != dim_) throw ConfigError("WeightOperator: dimension mismatch");
  switch (kind_) {
    case WeightKind::Identity: return x;
    case WeightKind::Diagonal: return diag_l_.asDiagonal() * x;
    case WeightKind::SparseSpd: {
      // F^T x = L^T Pi^T x
      Matrix px(dim_, x.cols());
      for (Index i = 0; i < dim_; ++i) px.row(i) = x.row(perm_[static_cast<size_t>(i)]);
      return sparse_l_.transpose() * px;
    }
    case WeightKind::DenseSpd: return dense_l_.transpose() * x;
  }
  return x;
}

Matrix WeightOperator::factor_apply(const Matrix& x) const {
  if (x.rows() != dim_) throw ConfigError("WeightOperator: dimension mismatch");
  switch (kind_) {
    case WeightKind::Identity: return x;
    case WeightKind::Diagonal: return diag_l_.asDiagonal() * x;
    case WeightKind::SparseSpd: {
      Matrix lx = sparse_l_ * x;
      Matrix out(dim_, x.cols());
      for (Index i = 0; i < dim_; ++i) out.row(perm_[static_cast<size_t>(i)]) = lx.row(i);
      return out;
    }
    case WeightKind::DenseSpd: return dense_l_ * x;
  }
  return x;
}

Matrix WeightOperator::factor_t_solve(const Matrix& x) const {
  if (x.rows() != dim_) throw ConfigError("WeightOperator: dimension mismatch");
  switch (kind_) {
    case WeightKind::Identity: return x;
    case WeightKind::Diagonal: return diag_l_.cwiseInverse().asDiagonal() * x;
    case WeightKind::SparseSpd: {
      // F^{-T} x = Pi L^{-T} x
      Matrix y = sparse_l_.transpose().triangularView<Eigen::Upper>().solve(x);
      Matrix out(dim_, x.cols());
      for (Index i = 0; i < dim_; ++i) out.row(perm_[static_cast<size_t>(i)]) = y.row(i);
      return out;
    }
    case WeightKind::DenseSpd:
      return dense_l_.transpose().triangularView<Eigen::Upper>().solve(x);
  }
  return x;
}

Matrix WeightOperator::factor_solve(const Matrix& x) const {
  if (x.rows() != dim_) throw ConfigError("WeightOperator: dimension mismatch");
  switch (kind_) {
    case WeightKind::Identity: return x;
    case WeightKind::Diagonal: return diag_l_.cwiseInverse().asDiagonal() * x;
    case WeightKind::SparseSpd: {
      // F^{-1} x = L^{-1} Pi^T x
      Matrix px(dim_, x.cols());
      for (Index i = 0; i < dim_; ++i) px.row(i) = x.row(perm_[static_cast<size_t>(i)]);
      return sparse_l_.triangularView<Eigen::Lower>().solve(px);
    }
    case WeightKind::DenseSpd:
      return dense_l_.triangularView<Eigen::Lower>().solve(x);
  }
  return x;
}

Vector WeightOperator::factor_column(Index j) const {
  if (j < 0 || j >= dim_) throw ConfigError("WeightOperator: column index out of range");
  Vector e = Vector::Zero(dim_);
  e(j) = 1.0;
  return factor_apply(e);
}

Vector WeightOperator::factor_t_row(Index i) const {
  if (i < 0 || i >= dim_) throw ConfigError("WeightOperator: row index out of range");
  // row i of F^T equals column i of F
  return factor_column(i);
}

Matrix WeightOperator::factor_dense() const {
  switch (kind_) {
    case WeightKind::Identity: return Matrix::Identity(dim_, dim_);
    case WeightKind::Diagonal: return Matrix(diag_l_.asDiagonal());
    case WeightKind::SparseSpd: return Matrix(sparse_l_);
    case WeightKind::DenseSpd: return dense_l_;
  }
  return Matrix::Identity(dim_, dim_);
}

Matrix WeightOperator::dense() const {
  switch (kind_) {
    case WeightKind::Identity: return Matrix::Identity(dim_, dim_);
    case WeightKind::Diagonal: return Matrix(diag_.asDiagonal());
    case WeightKind::SparseSpd: return Matrix(sparse_);
    case WeightKind::DenseSpd: return dense_;
  }
  return Matrix::Identity(dim_, dim_);
}

const SparseMatrix& WeightOperator::sparse_matrix() const {
  if (kind_ != WeightKind::SparseSpd)
    throw ConfigError("WeightOperator: sparse_matrix() requires sparse kind");
  return sparse_;
}

double WeightOperator::w_inner(const Vector& u, const Vector& v) const {
  if (u.size() != dim_ || v.size() != dim_)
    throw ConfigError("w_inner: dimension mismatch");
  return v.dot(apply(u));
}

double WeightOperator::w_norm(const Vector& u) const {
  if (u.size() != dim_) throw ConfigError("w_norm: dimension mismatch");
  // ||L^T u||_2 avoids cancellation in u^T W u
  return factor_t_apply(u).norm();
}

double WeightOperator::w_operator_norm(const Matrix& m) const {
  if (m.rows() != dim_ || m.cols() != dim_)
    throw ConfigError("w_operator_norm: matrix must be square of matching size");
  // ||L^T M L^{-T}||_2
  Matrix ltm = factor_t_apply(m);
  Matrix transformed = factor_solve(ltm.transpose()).transpose();
  return spectral_norm(transformed);
}

Vector WeightOperator::delta() const {
  Vector d(dim_);
  for (Index i = 0; i < dim_; ++i) d(i) = std::sqrt(diag_entry(i));
  return d;
}

double WeightOperator::diag_entry(Index i) const {
  if (i < 0 || i >= dim_) throw ConfigError("WeightOperator: index out of range");
  switch (kind_) {
    case WeightKind::Identity: return 1.0;
    case WeightKind::Diagonal: return diag_(i);
    case WeightKind::SparseSpd: return sparse_.coeff(i, i);
    case WeightKind::DenseSpd: return dense_(i, i);
  }
  return 1.0;
}

double WeightOperator::condition_estimate() const {
  switch (kind_) {
    case WeightKind::Identity: return 1.0;
    case WeightKind::Diagonal: return diag_.maxCoeff() / diag_.minCoeff();
    case WeightKind::DenseSpd: return spectral_condition(dense_);
    case WeightKind::SparseSpd: {
      if (dim_ <= densify_threshold_) return spectral_condition(Matrix(sparse_));
      // power iteration on W and on W^{-1} through the factor
      auto dominant = [this](bool inverse) {
        Vector x = Vector::Ones(dim_);
        for (Index i = 0; i < dim_; ++i) x(i) += 1e-3 * std::cos(double(i + 1));
        x.normalize();
        double lambda = 0.0;
        for (int it = 0; it < 2000; ++it) {
          Vector y = inverse ? solve(x) : apply(Vector(x));
          const double next = y.norm();
          y /= next;
          if (std::abs(next - lambda) <= 1e-6 * next && it > 2) return next;
          lambda = next;
          x = y;
        }
        return lambda;
      };
      return dominant(false) * dominant(true);
    }
  }
  return 1.0;
}

double w_inner(const Vector& u, const Vector& v, const WeightOperator& w) {
  return w.w_inner(u, v);
}

double w_norm(const Vector& u, const WeightOperator& w) { return w.w_norm(u); }

double w_operator_norm(const Matrix& m, const WeightOperator& w) {
  return w.w_operator_norm(m);
}

std::pair<Matrix, std::vector<Index>> factorize(const WeightOperator& w) {
  std::vector<Index> perm = w.factor_perm();
  if (perm.empty()) {
    perm.resize(static_cast<size_t>(w.dim()));
    std::iota(perm.begin(), perm.end(), Index{0});
  }
  return {w.factor_dense(), std::move(perm)};
}

std::pair<Vector, WeightOperator> equilibrate(const WeightOperator& w) {
  const Index m = w.dim();
  Vector d = w.delta();
  switch (w.kind()) {
    case WeightKind::Identity:
      return {Vector::Ones(m), WeightOperator::identity(m)};
    case WeightKind::Diagonal:
      return {d, WeightOperator::diagonal(Vector::Ones(m))};
    case WeightKind::SparseSpd: {
      const SparseMatrix& ws = w.sparse_matrix();
      std::vector<Eigen::Triplet<double>> trips;
      for (Index k = 0; k < ws.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(ws, k); it; ++it) {
          const double v = it.row() == it.col()
                               ? 1.0
                               : it.value() / (d(it.row()) * d(it.col()));
          trips.emplace_back(it.row(), it.col(), v);
        }
      SparseMatrix scaled(m, m);
      scaled.setFromTriplets(trips.begin(), trips.end());
      return {d, WeightOperator::sparse_spd(std::move(scaled))};
    }
    case WeightKind::DenseSpd: {
      Matrix scaled = w.dense();
      for (Index j = 0; j < m; ++j)
        for (Index i = 0; i < m; ++i)
          scaled(i, j) = (i == j) ? 1.0 : scaled(i, j) / (d(i) * d(j));
      return {d, WeightOperator::dense_spd(scaled)};
    }
  }
  return {Vector::Ones(m), WeightOperator::identity(m)};
}

double condition_estimate(const WeightOperator& w) { return w.condition_estimate(); }

}  // namespace deimkit
