#include "deimkit/kernels.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>

namespace deimkit {

namespace {

// Applies one Householder reflector (v, beta) to the trailing block of a.
void apply_reflector(Matrix& a, Index row0, Index col0, const Vector& v,
                     double beta) {
  if (beta == 0.0) return;
  auto block = a.block(row0, col0, a.rows() - row0, a.cols() - col0);
  Eigen::RowVectorXd w = v.transpose() * block;
  block.noalias() -= beta * v * w;
}

// Householder vector for x with v(0) = 1. Returns beta; on exit x-range of a
// is overwritten with [alpha; 0; ...].
double make_reflector(Vector& x, double& alpha) {
  const double sigma = x.tail(x.size() - 1).squaredNorm();
  double x0 = x(0);
  if (sigma == 0.0) {
    alpha = x0;
    x(0) = 1.0;
    return 0.0;
  }
  const double mu = std::sqrt(x0 * x0 + sigma);
  double v0 = (x0 <= 0.0) ? x0 - mu : -sigma / (x0 + mu);
  const double beta = 2.0 * v0 * v0 / (sigma + v0 * v0);
  x /= v0;
  x(0) = 1.0;
  alpha = mu;
  return beta;
}

}  // namespace

void householder_qr(const Matrix& a, Matrix* q, Matrix& r) {
  const Index m = a.rows(), n = a.cols(), k = std::min(m, n);
  Matrix work = a;
  std::vector<double> betas(static_cast<size_t>(k));
  std::vector<Vector> vs(static_cast<size_t>(k));
  for (Index j = 0; j < k; ++j) {
    Vector x = work.col(j).segment(j, m - j);
    double alpha = 0.0;
    betas[j] = make_reflector(x, alpha);
    vs[j] = x;
    apply_reflector(work, j, j, x, betas[j]);
    work(j, j) = alpha;
  }
  r = Matrix::Zero(k, n);
  for (Index i = 0; i < k; ++i)
    for (Index j = i; j < n; ++j) r(i, j) = work(i, j);
  if (q != nullptr) {
    *q = Matrix::Identity(m, k);
    for (Index j = k - 1; j >= 0; --j) apply_reflector(*q, j, 0, vs[j], betas[j]);
  }
}

PivotedQr qr_column_pivoted(const Matrix& a) {
  require_finite(a, "qr_column_pivoted");
  const Index m = a.rows(), n = a.cols(), k = std::min(m, n);
  Matrix work = a;
  std::vector<Index> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  Vector cn2(n), orig(n);
  for (Index j = 0; j < n; ++j) cn2(j) = orig(j) = work.col(j).squaredNorm();

  std::vector<double> betas(static_cast<size_t>(k));
  std::vector<Vector> vs(static_cast<size_t>(k));
  for (Index j = 0; j < k; ++j) {
    Index p = j;  // ties broken by lowest column index
    for (Index c = j + 1; c < n; ++c)
      if (cn2(c) > cn2(p)) p = c;
    if (p != j) {
      work.col(j).swap(work.col(p));
      std::swap(perm[j], perm[p]);
      std::swap(cn2(j), cn2(p));
      std::swap(orig(j), orig(p));
    }
    Vector x = work.col(j).segment(j, m - j);
    double alpha = 0.0;
    betas[j] = make_reflector(x, alpha);
    vs[j] = x;
    apply_reflector(work, j, j, x, betas[j]);
    work(j, j) = alpha;
    for (Index c = j + 1; c < n; ++c) {
      cn2(c) -= work(j, c) * work(j, c);
      // downdate safeguard: recompute when cancellation bites
      if (cn2(c) < 1e-12 * orig(c) || cn2(c) < 0.0) {
        cn2(c) = work.col(c).segment(j + 1, m - j - 1).squaredNorm();
        orig(c) = cn2(c);
      }
    }
  }
  PivotedQr out;
  out.perm = std::move(perm);
  out.r = Matrix::Zero(k, n);
  for (Index i = 0; i < k; ++i)
    for (Index j = i; j < n; ++j) out.r(i, j) = work(i, j);
  out.q = Matrix::Identity(m, k);
  for (Index j = k - 1; j >= 0; --j) apply_reflector(out.q, j, 0, vs[j], betas[j]);
  return out;
}

ThinSvd thin_svd(const Matrix& a) {
  require_finite(a, "thin_svd");
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
    throw NumericalError("thin_svd: SVD iteration failed to converge");
  ThinSvd out;
  out.u = svd.matrixU();
  out.sigma = svd.singularValues();
  out.v = svd.matrixV();
  // BDCSVD can return an inaccurate factorization on some inputs (deflation
  // artifacts); verify the reconstruction, fall back to Jacobi if it is off.
  const double anorm = a.norm();
  if (anorm > 0.0 &&
      (a - out.u * out.sigma.asDiagonal() * out.v.transpose()).norm() >
          1e-12 * anorm) {
    Eigen::JacobiSVD<Matrix> jsvd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.u = jsvd.matrixU();
    out.sigma = jsvd.singularValues();
    out.v = jsvd.matrixV();
  }
  // sign convention: largest-magnitude entry of each left vector is positive
  for (Index j = 0; j < out.u.cols(); ++j) {
    Index imax = 0;
    for (Index i = 1; i < out.u.rows(); ++i)
      if (std::abs(out.u(i, j)) > std::abs(out.u(imax, j))) imax = i;
    if (out.u(imax, j) < 0.0) {
      out.u.col(j) = -out.u.col(j);
      if (j < out.v.cols()) out.v.col(j) = -out.v.col(j);
    }
  }
  return out;
}

SrrqrResult srrqr(const Matrix& a, Index target_rank, double eta) {
  require_finite(a, "srrqr");
  const Index m = a.rows(), n = a.cols(), k = std::min(m, n);
  const Index r = target_rank;
  if (r < 1 || r > k)
    throw ConfigError("srrqr: target rank " + std::to_string(r) +
                      " outside [1, " + std::to_string(k) + "]");
  if (eta < 1.0) throw ConfigError("srrqr: eta must be >= 1");

  {
    Vector sv = thin_svd(a).sigma;
    if (sv(0) == 0.0 || sv(r - 1) <= 1e-12 * sv(0))
      throw NumericalError("srrqr: rank deficient below target rank, sigma_" +
                           std::to_string(r) + " = " + std::to_string(sv(r - 1)));
  }

  std::vector<Index> perm = qr_column_pivoted(a).perm;
  const int swap_cap =
      static_cast<int>(10.0 * static_cast<double>(n) *
                       std::max(1.0, std::log2(static_cast<double>(n)))) + 20;
  int swaps = 0;
  Matrix permuted(m, n), rfac, q;
  while (true) {
    for (Index j = 0; j < n; ++j) permuted.col(j) = a.col(perm[static_cast<size_t>(j)]);
    householder_qr(permuted, nullptr, rfac);
    if (n == r) break;
    const auto r11 = rfac.topLeftCorner(r, r);
    Matrix b = r11.triangularView<Eigen::Upper>().solve(rfac.topRightCorner(r, n - r));
    Index bi = 0, bj = 0;
    double best = 0.0;
    if (r < k) {
      // tall case: Gu-Eisenstat criterion with trailing column norms and
      // inverse row norms
      Matrix r11inv =
          r11.triangularView<Eigen::Upper>().solve(Matrix::Identity(r, r));
      Vector omega = r11inv.rowwise().norm();
      Vector gamma =
          rfac.block(r, r, k - r, n - r).colwise().norm().transpose();
      for (Index j = 0; j < n - r; ++j)
        for (Index i = 0; i < r; ++i) {
          const double rho = std::hypot(b(i, j), gamma(j) * omega(i));
          if (rho > best) {
            best = rho;
            bi = i;
            bj = j;
          }
        }
    } else {
      for (Index j = 0; j < n - r; ++j)
        for (Index i = 0; i < r; ++i)
          if (std::abs(b(i, j)) > best) {
            best = std::abs(b(i, j));
            bi = i;
            bj = j;
          }
    }
    if (best <= eta) break;
    std::swap(perm[static_cast<size_t>(bi)], perm[static_cast<size_t>(r + bj)]);
    if (++swaps > swap_cap)
      throw NumericalError("srrqr: swap count exceeded cap of " +
                           std::to_string(swap_cap));
  }
  for (Index j = 0; j < n; ++j) permuted.col(j) = a.col(perm[static_cast<size_t>(j)]);
  householder_qr(permuted, &q, rfac);
  SrrqrResult out;
  out.pivoted_qr = PivotedQr{std::move(q), std::move(rfac), std::move(perm)};
  out.target_rank = r;
  out.eta = eta;
  out.swap_count = swaps;
  return out;
}

CholeskyResult cholesky(const Matrix& w, bool pivoted) {
  require_finite(w, "cholesky");
  if (w.rows() != w.cols()) throw ConfigError("cholesky: matrix not square");
  const Index m = w.rows();
  const double scale = w.norm();
  const double asym = (w - w.transpose()).norm();
  if (scale > 0.0 && asym > 1e-6 * scale)
    throw ConfigError("cholesky: input asymmetric beyond 1e-6 relative");
  if (scale > 0.0 && asym > 1e-10 * scale)
    std::cerr << "cholesky: warning, symmetrizing input (relative asymmetry "
              << asym / scale << ")\n";
  Matrix a = 0.5 * (w + w.transpose());
  Matrix l = Matrix::Zero(m, m);
  std::vector<Index> perm(static_cast<size_t>(m));
  std::iota(perm.begin(), perm.end(), Index{0});
  for (Index col = 0; col < m; ++col) {
    if (pivoted) {
      Index p = col;
      for (Index i = col + 1; i < m; ++i)
        if (a(i, i) > a(p, p)) p = i;
      if (p != col) {
        a.row(col).swap(a.row(p));
        a.col(col).swap(a.col(p));
        l.row(col).swap(l.row(p));
        std::swap(perm[static_cast<size_t>(col)], perm[static_cast<size_t>(p)]);
      }
    }
    const double d = a(col, col);
    if (d <= 0.0)
      throw NumericalError("cholesky: not positive definite (pivot " +
                           std::to_string(col + 1) + ")");
    const double root = std::sqrt(d);
    l(col, col) = root;
    for (Index i = col + 1; i < m; ++i) l(i, col) = a(i, col) / root;
    for (Index j = col + 1; j < m; ++j)
      for (Index i = j; i < m; ++i) a(i, j) -= l(i, col) * l(j, col);
  }
  return CholeskyResult{std::move(l), std::move(perm)};
}

bool is_orthonormal(const Matrix& q, double tol) {
  const Index r = q.cols();
  return (q.transpose() * q - Matrix::Identity(r, r)).norm() <= tol;
}

Vector principal_angles(const Matrix& basis_a, const Matrix& basis_b) {
  if (basis_a.rows() != basis_b.rows())
    throw ConfigError("principal_angles: row dimension mismatch");
  if (!is_orthonormal(basis_a) || !is_orthonormal(basis_b))
    throw ConfigError("principal_angles: inputs must have orthonormal columns");
  Vector cosines = thin_svd(basis_a.transpose() * basis_b).sigma;
  Vector angles(cosines.size());
  for (Index i = 0; i < cosines.size(); ++i)
    angles(i) = std::acos(std::clamp(cosines(i), 0.0, 1.0));
  std::sort(angles.data(), angles.data() + angles.size());
  return angles;
}

Matrix solve_triangular(const Matrix& factor, Triangle tri, bool transpose,
                        const Matrix& rhs) {
  if (factor.rows() != factor.cols())
    throw ConfigError("solve_triangular: factor not square");
  if (factor.rows() != rhs.rows())
    throw ConfigError("solve_triangular: dimension mismatch");
  for (Index i = 0; i < factor.rows(); ++i)
    if (factor(i, i) == 0.0)
      throw NumericalError("solve_triangular: singular factor (zero diagonal at index " +
                           std::to_string(i + 1) + ")");
  const bool lower = (tri == Triangle::Lower) != transpose;
  Matrix op = transpose ? Matrix(factor.transpose()) : factor;
  if (lower) return op.triangularView<Eigen::Lower>().solve(rhs);
  return op.triangularView<Eigen::Upper>().solve(rhs);
}

Matrix pinv_apply(const Matrix& a, const Matrix& rhs) {
  if (a.cols() > a.rows())
    throw ConfigError("pinv_apply: expects cols <= rows");
  if (a.rows() != rhs.rows()) throw ConfigError("pinv_apply: dimension mismatch");
  ThinSvd svd = thin_svd(a);
  const double smax = svd.sigma.size() ? svd.sigma(0) : 0.0;
  const double smin = svd.sigma.size() ? svd.sigma(svd.sigma.size() - 1) : 0.0;
  if (smax == 0.0 || smin <= 1e-12 * smax)
    throw NumericalError("pinv_apply: rank deficient, sigma_min = " +
                         std::to_string(smin));
  return svd.v * svd.sigma.cwiseInverse().asDiagonal() * (svd.u.transpose() * rhs);
}

double spectral_norm(const Matrix& a) {
  Vector s = thin_svd(a).sigma;
  return s.size() ? s(0) : 0.0;
}

double spectral_condition(const Matrix& a) {
  Vector s = thin_svd(a).sigma;
  const double smin = s(s.size() - 1);
  if (smin <= 0.0) throw NumericalError("spectral_condition: singular matrix");
  return s(0) / smin;
}

}  // namespace deimkit
