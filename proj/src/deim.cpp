#include "deimkit/deim.hpp"

#include <algorithm>
#include <cmath>

namespace deimkit {

namespace {

void check_selection(const SelectionOperator& sel, Index m) {
  if (sel.m != m) throw ConfigError("deim: selection built for a different dimension");
  if (sel.indices.empty()) throw ConfigError("deim: empty selection");
  std::vector<bool> seen(static_cast<size_t>(m), false);
  for (Index i : sel.indices) {
    if (i < 0 || i >= m) throw ConfigError("deim: selection index out of range");
    if (seen[static_cast<size_t>(i)]) throw ConfigError("deim: repeated selection index");
    seen[static_cast<size_t>(i)] = true;
  }
}

Matrix selection_matrix(const SelectionOperator& sel) {
  Matrix s = Matrix::Zero(sel.m, static_cast<Index>(sel.indices.size()));
  for (size_t j = 0; j < sel.indices.size(); ++j)
    s(sel.indices[j], static_cast<Index>(j)) = 1.0;
  return s;
}

double min_sigma(const Matrix& a) {
  Vector sv = thin_svd(a).sigma;
  return sv(sv.size() - 1);
}

}  // namespace

const char* to_string(DeimVariant v) {
  switch (v) {
    case DeimVariant::Unweighted: return "deim";
    case DeimVariant::GeneralizedW: return "wdeim-generalized";
    case DeimVariant::PointwiseW: return "wdeim-pointwise";
    case DeimVariant::ScaledPointwiseW: return "wdeim-scaled";
    case DeimVariant::Oversampled: return "deim-oversampled";
  }
  return "unknown";
}

void DeimProjector::set_interp(const Matrix& s_t_x) {
  interp_matrix_ = s_t_x;
  ThinSvd svd = thin_svd(s_t_x);
  const double smin = svd.sigma(svd.sigma.size() - 1);
  if (smin <= 1e-12 * svd.sigma(0))
    throw NumericalError("deim: selected submatrix S^T X is numerically singular");
  if (s_t_x.rows() == s_t_x.cols()) {
    interp_qr_ = qr_column_pivoted(s_t_x);
  } else {
    interp_svd_ = std::move(svd);
  }
}

Vector DeimProjector::interp_solve(const Vector& rhs) const {
  if (interp_qr_) {
    const PivotedQr& qr = *interp_qr_;
    Vector y = solve_triangular(qr.r, Triangle::Upper, false, qr.q.transpose() * rhs);
    Vector x(y.size());
    for (size_t i = 0; i < qr.perm.size(); ++i) x(qr.perm[i]) = y(static_cast<Index>(i));
    return x;
  }
  const ThinSvd& svd = *interp_svd_;
  const double cutoff = 1e-12 * svd.sigma(0);
  Vector c = svd.u.transpose() * rhs;
  for (Index i = 0; i < c.size(); ++i)
    c(i) = svd.sigma(i) > cutoff ? c(i) / svd.sigma(i) : 0.0;
  return svd.v * c;
}

Vector DeimProjector::apply(const Vector& f) const {
  if (f.size() != dim()) throw ConfigError("deim apply: dimension mismatch");
  Vector sampled;
  switch (variant_) {
    case DeimVariant::GeneralizedW:
      sampled = sample_lt_ * f;
      break;
    case DeimVariant::ScaledPointwiseW:
      sampled = delta_sel_.cwiseProduct(selected_entries(f, selection_.indices));
      break;
    default:
      sampled = selected_entries(f, selection_.indices);
  }
  return left_ * interp_solve(sampled);
}

Vector DeimProjector::apply_sampled(const Vector& sampled) const {
  if (variant_ == DeimVariant::GeneralizedW)
    throw ConfigError("deim apply_sampled: generalized variant does not sample entries");
  if (sampled.size() != sample_count())
    throw ConfigError("deim apply_sampled: expected " + std::to_string(sample_count()) +
                      " sampled entries");
  if (variant_ == DeimVariant::ScaledPointwiseW)
    return left_ * interp_solve(delta_sel_.cwiseProduct(sampled));
  return left_ * interp_solve(sampled);
}

Matrix DeimProjector::assemble() const {
  const Index m = dim();
  const Index s = sample_count();
  Matrix sampler;
  if (variant_ == DeimVariant::GeneralizedW) {
    sampler = sample_lt_;
  } else {
    sampler = Matrix::Zero(s, m);
    for (Index j = 0; j < s; ++j)
      sampler(j, selection_.indices[static_cast<size_t>(j)]) =
          variant_ == DeimVariant::ScaledPointwiseW ? delta_sel_(j) : 1.0;
  }
  Matrix coeff(left_.cols(), m);
  for (Index j = 0; j < m; ++j) coeff.col(j) = interp_solve(sampler.col(j));
  return left_ * coeff;
}

Vector DeimProjector::pod_project(const Vector& f) const {
  if (euclid_basis_.size() == 0)
    throw ConfigError("deim pod_project: projector carries no POD basis");
  Vector coeffs = euclid_basis_.transpose() * weight_->factor_t_apply(f);
  return weight_->factor_t_solve(euclid_basis_ * coeffs);
}

DeimProjector build_deim(const Matrix& u_r, const SelectionOperator& sel) {
  require_finite(u_r, "build_deim");
  if (!is_orthonormal(u_r)) throw ConfigError("build_deim: basis must be orthonormal");
  check_selection(sel, u_r.rows());
  if (static_cast<Index>(sel.indices.size()) != u_r.cols())
    return build_oversampled(u_r, sel, nullptr);
  DeimProjector d;
  d.variant_ = DeimVariant::Unweighted;
  d.rank_ = u_r.cols();
  d.selection_ = sel;
  d.weight_ = std::make_shared<const WeightOperator>(WeightOperator::identity(u_r.rows()));
  d.left_ = u_r;
  d.angle_pair_ = u_r;
  d.euclid_basis_ = u_r;
  d.set_interp(selected_rows(u_r, sel.indices));
  d.error_constant_ = 1.0 / min_sigma(d.interp_matrix_);
  return d;
}

DeimProjector build_wdeim_generalized(const PodBasis& basis,
                                      const SelectionOperator& sel, WeightPtr w) {
  if (!w) throw ConfigError("build_wdeim_generalized: null weight");
  if (w->dim() != basis.u_hat.rows())
    throw ConfigError("build_wdeim_generalized: weight dimension mismatch");
  check_selection(sel, w->dim());
  const Index s = static_cast<Index>(sel.indices.size());
  DeimProjector d;
  d.variant_ = DeimVariant::GeneralizedW;
  d.rank_ = basis.rank;
  d.selection_ = sel;
  d.weight_ = std::move(w);
  d.left_ = basis.u_hat;
  d.angle_pair_ = basis.u_euclid;
  d.euclid_basis_ = basis.u_euclid;
  d.sample_lt_ = Matrix(s, d.weight_->dim());
  for (Index j = 0; j < s; ++j)
    d.sample_lt_.row(j) = d.weight_->factor_t_row(sel.indices[static_cast<size_t>(j)]);
  d.set_interp(selected_rows(basis.u_euclid, sel.indices));
  d.error_constant_ = 1.0 / min_sigma(d.interp_matrix_);
  d.interpolation_holds_ = s <= basis.rank;
  d.projection_holds_ = s >= basis.rank;
  return d;
}

DeimProjector build_wdeim_pointwise(const Matrix& y, WeightPtr w, RankSpec spec,
                                    double eta) {
  PodBasis basis = pod_basis_gsvd(y, w, spec);
  Matrix q, r;
  householder_qr(basis.u_hat, &q, r);
  SelectionOperator sel = select_srrqr(q, eta);
  DeimProjector d;
  d.variant_ = DeimVariant::PointwiseW;
  d.rank_ = basis.rank;
  d.selection_ = sel;
  d.weight_ = std::move(w);
  d.left_ = q;
  d.angle_pair_ = q;
  d.euclid_basis_ = basis.u_euclid;
  d.set_interp(selected_rows(q, sel.indices));
  d.error_constant_ =
      std::sqrt(d.weight_->condition_estimate()) / min_sigma(d.interp_matrix_);
  return d;
}

DeimProjector build_wdeim_scaled(const Matrix& y, WeightPtr w, RankSpec spec,
                                 double eta) {
  PodBasis basis = pod_basis_gsvd(y, w, spec);
  Vector delta = w->delta();
  Matrix q, r;
  Matrix scaled = delta.asDiagonal() * basis.u_hat;
  householder_qr(scaled, &q, r);
  SelectionOperator sel = select_srrqr(q, eta);
  DeimProjector d;
  d.variant_ = DeimVariant::ScaledPointwiseW;
  d.rank_ = basis.rank;
  d.selection_ = sel;
  d.left_ = delta.cwiseInverse().asDiagonal() * q;
  d.angle_pair_ = q;
  d.euclid_basis_ = basis.u_euclid;
  d.delta_ = delta;
  d.delta_sel_ = selected_entries(delta, sel.indices);
  d.set_interp(selected_rows(q, sel.indices));
  auto [dvec, ws] = equilibrate(*w);
  d.weight_ = std::move(w);
  d.error_constant_ =
      std::sqrt(ws.condition_estimate()) / min_sigma(d.interp_matrix_);
  return d;
}

DeimProjector build_oversampled(const Matrix& u_r, const SelectionOperator& sel,
                                WeightPtr w) {
  require_finite(u_r, "build_oversampled");
  if (!is_orthonormal(u_r))
    throw ConfigError("build_oversampled: basis must be orthonormal");
  check_selection(sel, u_r.rows());
  const Index s = static_cast<Index>(sel.indices.size());
  const Index r = u_r.cols();
  DeimProjector d;
  d.variant_ = DeimVariant::Oversampled;
  d.rank_ = r;
  d.selection_ = sel;
  d.weight_ = w ? std::move(w)
                : std::make_shared<const WeightOperator>(
                      WeightOperator::identity(u_r.rows()));
  if (d.weight_->kind() != WeightKind::Identity)
    throw ConfigError("build_oversampled: only the Euclidean geometry is supported");
  d.left_ = u_r;
  d.angle_pair_ = u_r;
  d.euclid_basis_ = u_r;
  d.set_interp(selected_rows(u_r, sel.indices));
  d.error_constant_ = 1.0 / min_sigma(d.interp_matrix_);
  d.interpolation_holds_ = s <= r;
  d.projection_holds_ = s >= r;
  return d;
}

CanonicalStructure canonical_analysis(const DeimProjector& d, double angle_tolerance) {
  Matrix s_mat = selection_matrix(d.selection());
  Vector angles = principal_angles(s_mat, d.angle_basis());
  CanonicalStructure cs;
  for (Index i = 0; i < angles.size(); ++i)
    if (angles(i) <= angle_tolerance) ++cs.ell;
  cs.p = angles.size() - cs.ell;
  cs.angles = angles.tail(cs.p);
  cs.norm_d = cs.p > 0 ? 1.0 / std::cos(cs.angles(cs.p - 1)) : 1.0;
  return cs;
}

Matrix canonical_basis(const DeimProjector& d, double angle_tolerance) {
  const Index m = d.dim();
  if (m > 500)
    throw ConfigError("canonical_basis: dimension exceeds the 500 limit");
  if (static_cast<Index>(d.selection().indices.size()) != d.rank())
    throw ConfigError("canonical_basis: requires s = r");
  Matrix a_mat = selection_matrix(d.selection());  // orthonormal in the variant geometry
  const Matrix& b_mat = d.angle_basis();
  ThinSvd svd = thin_svd(a_mat.transpose() * b_mat);  // cosines, descending
  const Index r = svd.sigma.size();
  Matrix a_dirs = a_mat * svd.u;
  Matrix b_dirs = b_mat * svd.v;
  Index ell = 0;
  for (Index i = 0; i < r; ++i) {
    const double c = std::min(1.0, svd.sigma(i));
    if (std::acos(c) <= angle_tolerance) ++ell;
  }
  // D z = z on the first ell columns; then (a_i, (b_i - c_i a_i)/s_i) pairs
  // realizing the tan(psi) blocks; zero block fills the complement.
  Matrix z(m, m);
  Index col = 0;
  for (Index i = 0; i < ell; ++i) z.col(col++) = a_dirs.col(i);
  for (Index i = ell; i < r; ++i) {
    const double c = std::min(1.0, svd.sigma(i));
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    if (s <= 0.0)
      throw NumericalError("canonical_basis: degenerate angle block");
    z.col(col++) = a_dirs.col(i);
    z.col(col++) = (b_dirs.col(i) - c * a_dirs.col(i)) / s;
  }
  // complete to an orthogonal basis via full Householder QR
  Eigen::HouseholderQR<Matrix> qr(z.leftCols(col));
  Matrix full_q = qr.householderQ() * Matrix::Identity(m, m);
  // keep the exact leading columns; use the QR complement for the rest
  z.rightCols(m - col) = full_q.rightCols(m - col);
  return z;
}

ErrorDecomposition error_decomposition(const DeimProjector& d, const Vector& f) {
  if (f.size() != d.dim()) throw ConfigError("error_decomposition: dimension mismatch");
  if (static_cast<Index>(d.selection().indices.size()) != d.rank())
    throw ConfigError("error_decomposition: requires s = r");
  Vector df = d.apply(f);
  Vector g, dg;
  switch (d.variant()) {
    case DeimVariant::GeneralizedW:
      g = d.weight().factor_t_apply(f);
      dg = d.weight().factor_t_apply(df);
      break;
    case DeimVariant::ScaledPointwiseW: {
      Vector delta = d.weight().delta();
      g = delta.cwiseProduct(f);
      dg = delta.cwiseProduct(df);
      break;
    }
    default:
      g = f;
      dg = df;
  }
  const Matrix& u = d.angle_basis();
  Vector pg = u * (u.transpose() * g);
  ErrorDecomposition e;
  e.orth_err = (g - pg).norm();
  e.oblique_excess = (dg - pg).norm();
  e.total = (g - dg).norm();
  e.kappa_prime = e.orth_err > 0.0
                      ? std::sqrt(1.0 + (e.oblique_excess / e.orth_err) *
                                            (e.oblique_excess / e.orth_err))
                      : 1.0;
  return e;
}

Vector dgeim_residuals(const DeimProjector& d, const Vector& f) {
  if (f.size() != d.dim()) throw ConfigError("dgeim_residuals: dimension mismatch");
  Vector df = d.apply(f);
  Vector err = df - f;
  const auto& idx = d.selection().indices;
  Vector res(static_cast<Index>(idx.size()));
  for (size_t j = 0; j < idx.size(); ++j)
    res(static_cast<Index>(j)) = d.weight().factor_column(idx[j]).dot(err);
  return res;
}

}  // namespace deimkit
