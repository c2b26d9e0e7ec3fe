#pragma once

#include <optional>

#include "deimkit/pod.hpp"
#include "deimkit/selection.hpp"

namespace deimkit {

enum class DeimVariant {
  Unweighted,
  GeneralizedW,
  PointwiseW,
  ScaledPointwiseW,
  Oversampled
};

const char* to_string(DeimVariant v);

/// Oblique DEIM projector D f = left * (S^T X)^+ * sample(f), with the
/// interpolation factor precomputed so apply costs O(m r + r s).
class DeimProjector {
 public:
  DeimVariant variant() const { return variant_; }
  Index dim() const { return left_.rows(); }
  Index rank() const { return rank_; }
  Index sample_count() const { return static_cast<Index>(selection_.indices.size()); }
  const SelectionOperator& selection() const { return selection_; }
  const WeightOperator& weight() const { return *weight_; }
  WeightPtr weight_ptr() const { return weight_; }

  /// The variant's certified error-constant: the factor multiplying
  /// ||f - P f||_W in its a-priori bound.
  double error_constant() const { return error_constant_; }

  /// True when S^T(D f) = S^T f (pointwise or generalized); false for the
  /// oversampled s > r case.
  bool interpolation_holds() const { return interpolation_holds_; }
  /// True when D P = P (s >= r); false for the undersampled s < r case.
  bool projection_holds() const { return projection_holds_; }

  Vector apply(const Vector& f) const;
  /// Pointwise variants only: apply from the s selected entries of f.
  Vector apply_sampled(const Vector& sampled) const;

  /// Dense m x m matrix of the projector; diagnostics and tests only.
  Matrix assemble() const;

  /// Orthonormal pair (selected identity columns vs. this matrix) whose
  /// principal angles govern the projector norm.
  const Matrix& angle_basis() const { return angle_pair_; }
  /// Euclidean-orthonormal POD factor U_r (empty for plain unweighted builds
  /// constructed straight from a basis matrix).
  const Matrix& euclid_basis() const { return euclid_basis_; }
  const Matrix& left_factor() const { return left_; }
  /// W-orthogonal projection P f onto the basis range in this projector's
  /// geometry.
  Vector pod_project(const Vector& f) const;

 private:
  friend DeimProjector build_deim(const Matrix& u_r, const SelectionOperator& sel);
  friend DeimProjector build_wdeim_generalized(const PodBasis& basis,
                                               const SelectionOperator& sel,
                                               WeightPtr w);
  friend DeimProjector build_wdeim_pointwise(const Matrix& y, WeightPtr w,
                                             RankSpec spec, double eta);
  friend DeimProjector build_wdeim_scaled(const Matrix& y, WeightPtr w,
                                          RankSpec spec, double eta);
  friend DeimProjector build_oversampled(const Matrix& u_r,
                                         const SelectionOperator& sel, WeightPtr w);

  DeimProjector() = default;
  void set_interp(const Matrix& s_t_x);  // factorize S^T X
  Vector interp_solve(const Vector& rhs) const;

  DeimVariant variant_ = DeimVariant::Unweighted;
  Index rank_ = 0;
  SelectionOperator selection_;
  WeightPtr weight_;
  Matrix left_;         // m x r factor applied last
  Matrix angle_pair_;   // orthonormal m x r partner of the selection
  Matrix euclid_basis_; // U_r where applicable
  Vector delta_sel_;    // scaled variant: diag(S^T Delta)
  Vector delta_;        // scaled variant: full diag sqrt(W_ii)
  Matrix sample_lt_;    // generalized variant: S^T L^T rows (s x m)
  // interp factor of the s x r matrix: square -> pivoted QR, else SVD pinv
  Matrix interp_matrix_;
  std::optional<PivotedQr> interp_qr_;
  std::optional<ThinSvd> interp_svd_;
  double error_constant_ = 1.0;
  bool interpolation_holds_ = true;
  bool projection_holds_ = true;
};

/// Classic oblique DEIM projector U_r (S^T U_r)^{-1} S^T.
DeimProjector build_deim(const Matrix& u_r, const SelectionOperator& sel);

/// Generalized-interpolation W-DEIM: D = U_hat (S^T U_r)^+ S^T L^T, with the
/// weighted selection operator S_w^T = S^T L^{-1}; ||D||_W = ||(S^T U_r)^+||_2.
DeimProjector build_wdeim_generalized(const PodBasis& basis,
                                      const SelectionOperator& sel, WeightPtr w);

/// Pointwise-interpolating W-DEIM: GSVD basis U_hat, thin QR U_hat = Q R,
/// sRRQR selection on Q^T; error constant sqrt(kappa2(W)) ||(S^T Q)^{-1}||_2.
DeimProjector build_wdeim_pointwise(const Matrix& y, WeightPtr w, RankSpec spec,
                                    double eta = 2.0);

/// Scaling-invariant pointwise W-DEIM via diagonal equilibration; error
/// constant sqrt(kappa2(W_s)) ||(S^T Q)^{-1}||_2.
DeimProjector build_wdeim_scaled(const Matrix& y, WeightPtr w, RankSpec spec,
                                 double eta = 2.0);

/// Pseudoinverse projector for s != r: interpolation holds for s < r,
/// projection holds for s > r.
DeimProjector build_oversampled(const Matrix& u_r, const SelectionOperator& sel,
                                WeightPtr w = nullptr);

/// Canonical structure of the projector: intersection dimension, nontrivial
/// principal angles, and the norm 1/cos(psi_max).
struct CanonicalStructure {
  Index ell = 0;   // dim of range intersection
  Index p = 0;     // rank(D) - ell
  Vector angles;   // psi_{ell+1} .. psi_{ell+p}, increasing, in (0, pi/2)
  double norm_d = 1.0;
};

CanonicalStructure canonical_analysis(const DeimProjector& d,
                                      double angle_tolerance = 1e-8);

/// Orthogonal basis Z realizing the block-canonical form (m <= 500).
Matrix canonical_basis(const DeimProjector& d, double angle_tolerance = 1e-8);

struct ErrorDecomposition {
  double orth_err = 0.0;        // ||(I - P) f||
  double oblique_excess = 0.0;  // ||D f - P f||
  double kappa_prime = 1.0;
  double total = 0.0;           // ||f - D f||
};

/// Pythagorean split of the projection error (s = r only), computed in the
/// Euclidean geometry the variant transforms to.
ErrorDecomposition error_decomposition(const DeimProjector& d, const Vector& f);

/// Generalized-interpolation residuals l_{i_j}^T (D f - f) for the selected
/// columns l_{i_j} of L.
Vector dgeim_residuals(const DeimProjector& d, const Vector& f);

}  // namespace deimkit
