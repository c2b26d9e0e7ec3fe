#include "deimkit/pod.hpp"

#include <cmath>
#include <sstream>

namespace deimkit {

namespace {

Index resolve_rank(const Vector& sigma, const RankSpec& spec) {
  if (spec.is_fixed()) {
    const Index r = spec.rank;
    if (r < 1) throw ConfigError("pod_basis: rank must be >= 1");
    const double smax = sigma.size() ? sigma(0) : 0.0;
    if (r > sigma.size() || smax == 0.0 || sigma(r - 1) <= 1e-12 * smax) {
      std::ostringstream os;
      os << "pod_basis: requested rank " << r << " exceeds numerical rank; sigma =";
      for (Index i = 0; i < sigma.size(); ++i) os << ' ' << sigma(i);
      throw NumericalError(os.str());
    }
    return r;
  }
  return rank_select(sigma, spec.tol);
}

void check_weight(const WeightPtr& w, const Matrix& y) {
  if (!w) throw ConfigError("pod_basis: null weight");
  if (w->dim() != y.rows()) throw ConfigError("pod_basis: weight dimension mismatch");
  if (y.cols() < 1) throw ConfigError("pod_basis: need at least one snapshot");
  require_finite(y, "pod_basis");
}

}  // namespace

Index rank_select(const Vector& sigma, double tol) {
  if (tol <= 0.0 || tol >= 1.0) throw ConfigError("rank_select: tol must be in (0,1)");
  for (Index i = 1; i < sigma.size(); ++i)
    if (sigma(i) > sigma(i - 1) + 1e-14 * sigma(0))
      throw ConfigError("rank_select: sigma not non-increasing");
  const double total = sigma.squaredNorm();
  if (total == 0.0) throw NumericalError("rank_select: all singular values zero");
  double tail = total;
  for (Index r = 1; r <= sigma.size(); ++r) {
    tail -= sigma(r - 1) * sigma(r - 1);
    if (std::sqrt(std::max(tail, 0.0) / total) <= tol) return r;
  }
  return sigma.size();
}

PodBasis pod_basis(const Matrix& y, WeightPtr w, RankSpec spec) {
  check_weight(w, y);
  ThinSvd svd = thin_svd(w->factor_t_apply(y));
  const Index r = resolve_rank(svd.sigma, spec);
  PodBasis basis;
  basis.u_euclid = svd.u.leftCols(r);
  basis.u_hat = w->kind() == WeightKind::Identity ? basis.u_euclid
                                                  : w->factor_t_solve(basis.u_euclid);
  basis.sigma = svd.sigma;
  basis.rank = r;
  basis.weight = std::move(w);
  return basis;
}

std::pair<Matrix, Matrix> weighted_qr(const Matrix& y, const WeightOperator& w) {
  if (y.rows() != w.dim()) throw ConfigError("weighted_qr: dimension mismatch");
  require_finite(y, "weighted_qr");
  const Index n = y.cols();
  Matrix q = y;
  Matrix r = Matrix::Zero(n, n);
  double scale = 0.0;
  for (Index j = 0; j < n; ++j) scale = std::max(scale, w.w_norm(y.col(j)));
  for (Index j = 0; j < n; ++j) {
    Vector v = q.col(j);
    for (int pass = 0; pass < 2; ++pass) {  // twice is enough
      for (Index i = 0; i < j; ++i) {
        const double c = w.w_inner(v, q.col(i));
        v -= c * q.col(i);
        r(i, j) += c;
      }
    }
    const double nrm = w.w_norm(v);
    if (nrm < 1e-13 * scale)
      throw NumericalError("weighted_qr: breakdown at column " + std::to_string(j + 1) +
                           " (W-norm " + std::to_string(nrm) + ")");
    q.col(j) = v / nrm;
    r(j, j) = nrm;
  }
  return {std::move(q), std::move(r)};
}

PodBasis pod_basis_gsvd(const Matrix& y, WeightPtr w, RankSpec spec) {
  check_weight(w, y);
  // Compress to a Euclidean-orthonormal range basis first so the weighted MGS
  // runs on a well-conditioned, full-rank column set even when the snapshot
  // count exceeds the numerical rank.
  ThinSvd pre = thin_svd(y);
  Index rho = 0;
  while (rho < pre.sigma.size() && pre.sigma(rho) > 1e-14 * pre.sigma(0)) ++rho;
  if (rho == 0) throw NumericalError("pod_basis_gsvd: snapshot matrix is zero");
  auto [qy, ry] = weighted_qr(pre.u.leftCols(rho), *w);
  // L^T Y = (L^T Q_Y) (R_Y Sigma V^T); the parenthesized right factor has the
  // same singular values as L^T Y, with orthonormal left factor L^T Q_Y.
  Matrix reff = ry * pre.sigma.head(rho).asDiagonal();
  ThinSvd svd = thin_svd(reff);
  const Index r = resolve_rank(svd.sigma, spec);
  PodBasis basis;
  basis.u_hat = qy * svd.u.leftCols(r);
  basis.u_euclid = w->factor_t_apply(basis.u_hat);
  basis.sigma = svd.sigma;
  basis.rank = r;
  basis.weight = std::move(w);
  return basis;
}

Vector pod_project(const PodBasis& basis, const Vector& f) {
  if (f.size() != basis.u_hat.rows()) throw ConfigError("pod_project: dimension mismatch");
  // U_hat^T W f = u_euclid^T (F^T f)
  Vector coeffs = basis.u_euclid.transpose() * basis.weight->factor_t_apply(f);
  return basis.u_hat * coeffs;
}

}  // namespace deimkit
