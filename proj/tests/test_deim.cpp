#include <doctest.h>

#include <cmath>
#include <memory>

#include "deimkit/deim.hpp"
#include "test_util.hpp"

using namespace deimkit;

namespace {

WeightPtr identity_w(Index m) {
  return std::make_shared<WeightOperator>(WeightOperator::identity(m));
}

WeightPtr dense_w(const Matrix& w) {
  return std::make_shared<WeightOperator>(WeightOperator::dense_spd(w));
}

WeightPtr diag_w(const Vector& d) {
  return std::make_shared<WeightOperator>(WeightOperator::diagonal(d));
}

double w_norm_of(const Matrix& wmat, const Vector& v) {
  return std::sqrt(v.dot(wmat * v));
}

}  // namespace

TEST_CASE("analytic 2D projector: ||D|| = 1/cos(angle)") {
  // basis = span{(cos t, sin t)}, selection = first coordinate, t = pi/3
  const double t = M_PI / 3.0;
  Matrix u(2, 1);
  u << std::cos(t), std::sin(t);
  SelectionOperator sel;
  sel.indices = {0};
  sel.m = 2;
  sel.kappa = 1.0 / std::cos(t);
  DeimProjector d = build_deim(u, sel);
  Matrix dm = d.assemble();
  CHECK(tu::smax(dm) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(tu::smax(Matrix(Matrix::Identity(2, 2) - dm)) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CanonicalStructure cs = canonical_analysis(d);
  CHECK(cs.ell == 0);
  CHECK(cs.p == 1);
  CHECK(cs.angles(0) == doctest::Approx(t).epsilon(1e-12));
  CHECK(cs.norm_d == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("exhaustive 2-of-4 selections: assembled projector equals the formula") {
  Rng rng(51);
  Matrix u = random_orthonormal(4, 2, rng);
  for (Index i = 0; i < 4; ++i) {
    for (Index j = i + 1; j < 4; ++j) {
      Matrix stu(2, 2);
      stu.row(0) = u.row(i);
      stu.row(1) = u.row(j);
      if (std::abs(stu.determinant()) < 1e-8) continue;
      SelectionOperator sel;
      sel.indices = {i, j};
      sel.m = 4;
      sel.kappa = 1.0 / tu::smin(stu);
      DeimProjector d = build_deim(u, sel);
      Matrix st = Matrix::Zero(2, 4);
      st(0, i) = 1.0;
      st(1, j) = 1.0;
      Matrix ref = u * stu.inverse() * st;
      CHECK((d.assemble() - ref).norm() <= 1e-10 * ref.norm());
      Vector f = random_normal(4, 1, rng);
      CHECK((d.apply(f) - ref * f).norm() <= 1e-12 * f.norm());
    }
  }
}

TEST_CASE("idempotence and interpolation across all variants") {
  Rng rng(52);
  const Index m = 25, n = 12, r = 5;
  Matrix y = random_normal(m, n, rng);
  Matrix wmat = tu::random_spd(m, rng);
  Vector dvec = Vector::LinSpaced(m, 0.5, 3.0);

  std::vector<DeimProjector> projectors;
  Matrix u = random_orthonormal(m, r, rng);
  projectors.push_back(build_deim(u, select_srrqr(u)));
  {
    WeightPtr w = dense_w(wmat);
    PodBasis basis = pod_basis(y, w, RankSpec::fixed(r));
    projectors.push_back(
        build_wdeim_generalized(basis, select_srrqr(basis.u_euclid), w));
    projectors.push_back(build_wdeim_pointwise(y, w, RankSpec::fixed(r)));
    projectors.push_back(build_wdeim_scaled(y, w, RankSpec::fixed(r)));
  }
  projectors.push_back(build_wdeim_pointwise(y, diag_w(dvec), RankSpec::fixed(r)));

  for (const DeimProjector& d : projectors) {
    Matrix dm = d.assemble();
    CHECK((dm * dm - dm).norm() <= 1e-9 * (dm.norm() + 1.0));
    Vector f = random_normal(m, 1, rng);
    Vector df = d.apply(f);
    CHECK((dm * f - df).norm() <= 1e-10 * (df.norm() + 1.0));
    CHECK(d.interpolation_holds());
    CHECK(d.projection_holds());
    if (d.variant() == DeimVariant::PointwiseW ||
        d.variant() == DeimVariant::ScaledPointwiseW ||
        d.variant() == DeimVariant::Unweighted) {
      // pointwise interpolation at the selected entries
      for (Index idx : d.selection().indices)
        CHECK(df(idx) == doctest::Approx(f(idx)).epsilon(1e-8));
    }
  }
}

TEST_CASE("generalized W-DEIM with identity weight reduces to plain DEIM") {
  Rng rng(53);
  const Index m = 20, n = 10, r = 4;
  Matrix y = random_normal(m, n, rng);
  WeightPtr w = identity_w(m);
  PodBasis basis = pod_basis(y, w, RankSpec::fixed(r));
  SelectionOperator sel = select_srrqr(basis.u_euclid);
  DeimProjector dw = build_wdeim_generalized(basis, sel, w);
  DeimProjector d0 = build_deim(basis.u_euclid, sel);
  CHECK((dw.assemble() - d0.assemble()).norm() <= 1e-12 * d0.assemble().norm());
  CHECK(dw.error_constant() == doctest::Approx(d0.error_constant()).epsilon(1e-12));
}

TEST_CASE("generalized W-DEIM: W-norm identity and interpolation in L^T geometry") {
  Rng rng(54);
  const Index m = 18, n = 9, r = 4;
  Matrix y = random_normal(m, n, rng);
  Matrix wmat = tu::random_spd(m, rng);
  WeightPtr w = dense_w(wmat);
  PodBasis basis = pod_basis(y, w, RankSpec::fixed(r));
  SelectionOperator sel = select_srrqr(basis.u_euclid);
  DeimProjector d = build_wdeim_generalized(basis, sel, w);
  Matrix dm = d.assemble();
  // ||D||_W equals the certified constant (Euclidean norm of the transformed
  // operator L^T D L^{-T})
  CHECK(w->w_operator_norm(dm) ==
        doctest::Approx(d.error_constant()).epsilon(1e-8));
  // interpolation of the selected rows of L^T: S^T L^T D f = S^T L^T f
  Vector f = random_normal(m, 1, rng);
  Vector res = dgeim_residuals(d, f - d.apply(f).eval());
  Vector res0 = dgeim_residuals(d, f);
  (void)res;
  CHECK(res0.cwiseAbs().maxCoeff() <= 1e-9 * f.norm());
  // error bound: ||f - D f||_W <= const * ||f - P f||_W
  Vector pf = d.pod_project(f);
  CHECK(w_norm_of(wmat, f - dm * f) <=
        d.error_constant() * w_norm_of(wmat, f - pf) * (1.0 + 1e-8) + 1e-12);
}

TEST_CASE("generalized W-DEIM weighted selection is W-orthonormal") {
  // columns of the weighted sampler S_w = L^{-T} S satisfy S_w^T W S_w = I
  Rng rng(55);
  const Index m = 14, n = 8, r = 3;
  Matrix y = random_normal(m, n, rng);
  Matrix wmat = tu::random_spd(m, rng);
  WeightPtr w = dense_w(wmat);
  PodBasis basis = pod_basis(y, w, RankSpec::fixed(r));
  DeimProjector d =
      build_wdeim_generalized(basis, select_srrqr(basis.u_euclid), w);
  Matrix s = Matrix::Zero(m, r);
  for (Index k = 0; k < r; ++k)
    s(d.selection().indices[static_cast<size_t>(k)], k) = 1.0;
  Matrix sw = w->factor_t_solve(s);  // L^{-T} S
  CHECK((sw.transpose() * wmat * sw - Matrix::Identity(r, r)).norm() <= 1e-9);
}

TEST_CASE("pointwise W-DEIM with identity weight matches plain DEIM on the POD basis") {
  Rng rng(56);
  const Index m = 22, n = 11, r = 5;
  Matrix y = random_normal(m, n, rng);
  WeightPtr w = identity_w(m);
  DeimProjector dp = build_wdeim_pointwise(y, w, RankSpec::fixed(r));
  PodBasis basis = pod_basis(y, w, RankSpec::fixed(r));
  DeimProjector d0 = build_deim(basis.u_euclid, select_srrqr(basis.u_euclid));
  // same selected rows and same projector
  REQUIRE(dp.selection().indices.size() == d0.selection().indices.size());
  for (size_t k = 0; k < dp.selection().indices.size(); ++k)
    CHECK(dp.selection().indices[k] == d0.selection().indices[k]);
  CHECK((dp.assemble() - d0.assemble()).norm() <= 1e-10 * d0.assemble().norm());
}

TEST_CASE("pointwise W-DEIM: apply_sampled agrees with apply and bound holds") {
  Rng rng(57);
  const Index m = 20, n = 10, r = 4;
  Matrix y = random_normal(m, n, rng);
  Matrix wmat = tu::random_spd(m, rng);
  WeightPtr w = dense_w(wmat);
  DeimProjector d = build_wdeim_pointwise(y, w, RankSpec::fixed(r));
  Vector f = random_normal(m, 1, rng);
  Vector sampled = selected_entries(f, d.selection().indices);
  CHECK((d.apply(f) - d.apply_sampled(sampled)).norm() <= 1e-12 * f.norm());
  // a-priori bound with the certified constant
  Vector pf = d.pod_project(f);
  CHECK(w_norm_of(wmat, f - d.apply(f).eval()) <=
        d.error_constant() * w_norm_of(wmat, f - pf) * (1.0 + 1e-6) + 1e-12);
  // the constant contains sqrt(kappa2(W))
  CHECK(d.error_constant() >= std::sqrt(tu::smax(wmat) / tu::smin(wmat)) - 1e-8);
}

TEST_CASE("scaled pointwise W-DEIM is invariant under diagonal rescaling") {
  Rng rng(58);
  const Index m = 16, n = 8, r = 4;
  Matrix y = random_normal(m, n, rng);
  Matrix base = tu::random_spd(m, rng);
  Vector c(m);
  for (Index i = 0; i < m; ++i) c(i) = std::pow(10.0, rng.uniform(-3.0, 3.0));
  Matrix scaled_w = c.asDiagonal() * base * c.asDiagonal();
  DeimProjector d1 = build_wdeim_scaled(y, dense_w(base), RankSpec::fixed(r));
  DeimProjector d2 = build_wdeim_scaled(y, dense_w(scaled_w), RankSpec::fixed(r));
  // equilibration removes the diagonal rescaling entirely, so the
  // conditioning part of the constant is scale-free
  Matrix ws1 = equilibrate(*dense_w(base)).second.dense();
  Matrix ws2 = equilibrate(*dense_w(scaled_w)).second.dense();
  CHECK((ws1 - ws2).norm() <= 1e-10 * ws1.norm());
  // both constants obey sqrt(kappa2(W_s)) times the selection certificate
  const double cond_ws = tu::smax(ws1) / tu::smin(ws1);
  const double sel_bound1 = std::sqrt(
      1.0 + 4.0 * static_cast<double>(r) * static_cast<double>(m - r));
  CHECK(d1.error_constant() <= std::sqrt(cond_ws) * sel_bound1 * (1.0 + 1e-6));
  CHECK(d2.error_constant() <= std::sqrt(cond_ws) * sel_bound1 * (1.0 + 1e-6));
}

TEST_CASE("scaled pointwise W-DEIM with diagonal weight has kappa2(W_s) = 1") {
  Rng rng(59);
  const Index m = 15, n = 8, r = 4;
  Matrix y = random_normal(m, n, rng);
  Vector dvec(m);
  for (Index i = 0; i < m; ++i) dvec(i) = std::pow(10.0, rng.uniform(-4.0, 4.0));
  DeimProjector d = build_wdeim_scaled(y, diag_w(dvec), RankSpec::fixed(r));
  // W_s = I, so the constant is exactly ||(S^T Q)^{-1}||_2 = kappa of selection
  CHECK(d.error_constant() ==
        doctest::Approx(d.selection().kappa).epsilon(1e-9));
  Matrix dm = d.assemble();
  CHECK((dm * dm - dm).norm() <= 1e-9 * dm.norm());
  Vector f = random_normal(m, 1, rng);
  for (Index idx : d.selection().indices)
    CHECK(d.apply(f)(idx) == doctest::Approx(f(idx)).epsilon(1e-7));
}

TEST_CASE("scaled pointwise with identity weight equals pointwise") {
  Rng rng(60);
  const Index m = 18, n = 9, r = 4;
  Matrix y = random_normal(m, n, rng);
  DeimProjector dp = build_wdeim_pointwise(y, identity_w(m), RankSpec::fixed(r));
  DeimProjector ds = build_wdeim_scaled(y, identity_w(m), RankSpec::fixed(r));
  CHECK((dp.assemble() - ds.assemble()).norm() <= 1e-10 * dp.assemble().norm());
  CHECK(dp.error_constant() == doctest::Approx(ds.error_constant()).epsilon(1e-10));
}

TEST_CASE("oversampled s > r keeps projection, drops interpolation") {
  Rng rng(61);
  const Index m = 30, r = 4, s = 8;
  Matrix u = random_orthonormal(m, r, rng);
  SelectionOperator sel = select_oversampled(u, s, SelectionStrategy::Srrqr);
  DeimProjector d = build_oversampled(u, sel);
  CHECK(d.variant() == DeimVariant::Oversampled);
  CHECK(d.projection_holds());
  CHECK_FALSE(d.interpolation_holds());
  Matrix dm = d.assemble();
  CHECK((dm * dm - dm).norm() <= 1e-9);
  // D u = u (projection onto range of u holds)
  CHECK((dm * u - u).norm() <= 1e-9);
  // least-squares oracle: D f = u (S^T u)^+ S^T f
  Vector f = random_normal(m, 1, rng);
  Matrix su = selected_rows(u, sel.indices);
  Vector sf = selected_entries(f, sel.indices);
  Vector coef = (su.transpose() * su).ldlt().solve(su.transpose() * sf);
  CHECK((d.apply(f) - u * coef).norm() <= 1e-9 * f.norm());
  // interpolation genuinely fails for generic f
  Vector df = d.apply(f);
  double interp_gap = 0.0;
  for (Index idx : sel.indices) interp_gap = std::max(interp_gap, std::abs(df(idx) - f(idx)));
  CHECK(interp_gap > 1e-8);
}

TEST_CASE("undersampled s < r keeps interpolation, drops projection") {
  Rng rng(62);
  const Index m = 30, r = 6, s = 4;
  Matrix u = random_orthonormal(m, r, rng);
  // take the first s indices of a plain srrqr selection of the leading block
  SelectionOperator lead = select_srrqr(u.leftCols(s));
  SelectionOperator sel = lead;
  sel.kappa = 0.0;  // recomputed by the builder
  DeimProjector d = build_oversampled(u, sel);
  CHECK_FALSE(d.projection_holds());
  CHECK(d.interpolation_holds());
  Vector f = random_normal(m, 1, rng);
  Vector df = d.apply(f);
  // minimum-norm solution still interpolates because S^T u has full row rank
  for (Index idx : sel.indices)
    CHECK(df(idx) == doctest::Approx(f(idx)).epsilon(1e-8));
  // projection genuinely fails
  Matrix dm = d.assemble();
  CHECK((dm * u - u).norm() > 1e-6);
}

TEST_CASE("canonical analysis agrees across three routes") {
  Rng rng(63);
  for (int trial = 0; trial < 10; ++trial) {
    const Index m = 10 + rng.uniform_index(30);
    const Index r = 2 + rng.uniform_index(5);
    Matrix u = random_orthonormal(m, r, rng);
    SelectionOperator sel = select_srrqr(u);
    DeimProjector d = build_deim(u, sel);
    CanonicalStructure cs = canonical_analysis(d);
    CHECK(cs.ell + cs.p == r);
    Matrix dm = d.assemble();
    // route 2: spectral norm of the assembled projector
    CHECK(cs.norm_d == doctest::Approx(tu::smax(dm)).epsilon(1e-8));
    // ||I - D|| = ||D|| for nontrivial oblique projectors
    if (cs.p > 0 && r < m)
      CHECK(tu::smax(Matrix(Matrix::Identity(m, m) - dm)) ==
            doctest::Approx(cs.norm_d).epsilon(1e-8));
    // route 3: selection kappa = 1/cos(psi_max) = norm
    CHECK(cs.norm_d == doctest::Approx(sel.kappa).epsilon(1e-8));
    // angles increasing and in (0, pi/2)
    for (Index k = 0; k < cs.angles.size(); ++k) {
      CHECK(cs.angles(k) > 0.0);
      CHECK(cs.angles(k) < M_PI / 2.0);
      if (k > 0) CHECK(cs.angles(k) >= cs.angles(k - 1) - 1e-12);
    }
  }
}

TEST_CASE("canonical basis realizes the block form") {
  Rng rng(64);
  const Index m = 12, r = 3;
  Matrix u = random_orthonormal(m, r, rng);
  SelectionOperator sel = select_srrqr(u);
  DeimProjector d = build_deim(u, sel);
  CanonicalStructure cs = canonical_analysis(d);
  Matrix z = canonical_basis(d);
  REQUIRE(z.rows() == m);
  REQUIRE(z.cols() == m);
  CHECK(is_orthonormal(z, 1e-9));
  Matrix t = z.transpose() * d.assemble() * z;
  // expected: ell identity entries, then p 2x2 blocks [[1,0],[tan psi,0]],
  // then zeros
  Matrix expected = Matrix::Zero(m, m);
  for (Index k = 0; k < cs.ell; ++k) expected(k, k) = 1.0;
  for (Index k = 0; k < cs.p; ++k) {
    const Index base = cs.ell + 2 * k;
    expected(base, base) = 1.0;
    expected(base + 1, base) = std::tan(cs.angles(k));
  }
  CHECK((t - expected).norm() <= 1e-7 * (expected.norm() + 1.0));
}

TEST_CASE("error decomposition is Pythagorean with kappa' <= ||D||") {
  Rng rng(65);
  const Index m = 25, r = 5;
  Matrix u = random_orthonormal(m, r, rng);
  DeimProjector d = build_deim(u, select_srrqr(u));
  const double norm_d = tu::smax(d.assemble());
  for (int trial = 0; trial < 20; ++trial) {
    Vector f = random_normal(m, 1, rng);
    ErrorDecomposition e = error_decomposition(d, f);
    CHECK(e.total * e.total ==
          doctest::Approx(e.orth_err * e.orth_err +
                          e.oblique_excess * e.oblique_excess)
              .epsilon(1e-8));
    CHECK(e.total == doctest::Approx((f - d.apply(f).eval()).norm()).epsilon(1e-9));
    CHECK(e.kappa_prime <= norm_d * (1.0 + 1e-9));
    CHECK(e.total <= e.kappa_prime * e.orth_err * (1.0 + 1e-9) + 1e-13);
  }
}

TEST_CASE("projector norm equals an independent tangent-based computation") {
  Rng rng(66);
  const Index m = 20, r = 4;
  Matrix u = random_orthonormal(m, r, rng);
  SelectionOperator sel = select_srrqr(u);
  DeimProjector d = build_deim(u, sel);
  // tangent route: with U1 = S^T U, U2 the complementary rows,
  // ||D||^2 = 1 + ||U2 U1^{-1}||_2^2
  Matrix u1(r, r);
  for (Index k = 0; k < r; ++k) u1.row(k) = u.row(sel.indices[static_cast<size_t>(k)]);
  std::vector<bool> picked(static_cast<size_t>(m), false);
  for (Index idx : sel.indices) picked[static_cast<size_t>(idx)] = true;
  Matrix u2(m - r, r);
  Index row = 0;
  for (Index i = 0; i < m; ++i)
    if (!picked[static_cast<size_t>(i)]) u2.row(row++) = u.row(i);
  const double tan_max = tu::smax(Matrix(u2 * u1.inverse()));
  CHECK(tu::smax(d.assemble()) ==
        doctest::Approx(std::sqrt(1.0 + tan_max * tan_max)).epsilon(1e-9));
}

TEST_CASE("builder error paths") {
  Rng rng(67);
  Matrix u = random_orthonormal(10, 3, rng);
  SelectionOperator sel = select_srrqr(u);
  // oversampled with a non-identity weight is not supported
  Matrix wmat = tu::random_spd(10, rng);
  SelectionOperator over = select_oversampled(u, 5, SelectionStrategy::Srrqr);
  CHECK_THROWS_AS(build_oversampled(u, over, dense_w(wmat)), ConfigError);
  // singular sampled block
  Matrix udeg = Matrix::Zero(10, 2);
  udeg(0, 0) = 1.0;
  udeg(1, 1) = 1.0;
  SelectionOperator bad;
  bad.indices = {5, 6};  // rows of zeros
  bad.m = 10;
  CHECK_THROWS_AS(build_deim(udeg, bad), NumericalError);
  // selection size mismatch with basis dimension
  SelectionOperator wrong;
  wrong.indices = {0, 1, 2, 3};
  wrong.m = 10;
  DeimProjector d4 = build_deim(u, wrong);  // s > r: delegates to oversampled
  CHECK(d4.variant() == DeimVariant::Oversampled);
}
