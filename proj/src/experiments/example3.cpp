#include <chrono>
#include <cmath>
#include <filesystem>
#include <string>

#include "deimkit/deim.hpp"
#include "deimkit/experiments.hpp"
#include "deimkit/fem.hpp"
#include "deimkit/io.hpp"

namespace deimkit {

namespace {

double peak_h(double z, double mu) {
  const double d = 2.0 - z - 0.99 * mu;
  return d * d;
}

double peak_g(double x1, double x2, double mu1, double mu2) {
  return 1.0 / std::sqrt(peak_h(x1, mu1) + peak_h(x2, mu2) + 0.01);
}

// four-corner-peak target: the base term plus its three grid reflections
double f_corner(double x1, double x2, double mu1, double mu2) {
  return peak_g(x1, x2, mu1, mu2) + peak_g(1.0 - x1, x2, mu1, mu2) +
         peak_g(x1, 1.0 - x2, mu1, mu2) + peak_g(1.0 - x1, 1.0 - x2, mu1, mu2);
}

Vector corner_snapshot(Index grid_n, double mu1, double mu2) {
  const double h = 1.0 / static_cast<double>(grid_n - 1);
  Vector f(grid_n * grid_n);
  for (Index iy = 0; iy < grid_n; ++iy)
    for (Index ix = 0; ix < grid_n; ++ix)
      f(ix + grid_n * iy) = f_corner(static_cast<double>(ix) * h,
                                     static_cast<double>(iy) * h, mu1, mu2);
  return f;
}

Matrix corner_snapshots(Index grid_n, Index per_side) {
  Matrix y(grid_n * grid_n, per_side * per_side);
  parallel_for(per_side * per_side, [&](Index k) {
    const Index i = k % per_side;
    const Index j = k / per_side;
    const double mu1 = static_cast<double>(i) / static_cast<double>(per_side - 1);
    const double mu2 = static_cast<double>(j) / static_cast<double>(per_side - 1);
    y.col(k) = corner_snapshot(grid_n, mu1, mu2);
  });
  return y;
}

PodBasis slice_basis(const PodBasis& basis, Index r) {
  PodBasis out;
  out.u_hat = basis.u_hat.leftCols(r);
  out.u_euclid = basis.u_euclid.leftCols(r);
  out.sigma = basis.sigma;
  out.rank = r;
  out.weight = basis.weight;
  return out;
}

// max over the test grid of ||f - Df||_W / ||f||_W, with the a-priori bound
// ||f - Df||_W <= constant * ||f - Pf||_W enforced as a hard inequality
double sweep_test_grid(Index grid_n, Index test_side, const DeimProjector& proj,
                       double constant, const WeightOperator& w,
                       const std::function<Vector(const Vector&)>& pod_proj) {
  const Index n_test = test_side * test_side;
  Vector errs(n_test);
  parallel_for(n_test, [&](Index k) {
    const Index i = k % test_side;
    const Index j = k / test_side;
    const double mu1 = static_cast<double>(i) / static_cast<double>(test_side - 1);
    const double mu2 = static_cast<double>(j) / static_cast<double>(test_side - 1);
    Vector f = corner_snapshot(grid_n, mu1, mu2);
    Vector df = proj.apply(f);
    const double err = w.w_norm(f - df);
    const double orth = w.w_norm(f - pod_proj(f));
    const double fn = w.w_norm(f);
    if (err > constant * orth * (1.0 + 1e-8) + 1e-13 * fn)
      throw NumericalError("example3/4: theorem bound violated at mu = (" +
                           std::to_string(mu1) + ", " + std::to_string(mu2) + ")");
    errs(k) = fn > 0.0 ? err / fn : 0.0;
  });
  return errs.maxCoeff();
}

struct CornerSetup {
  Index grid_n;
  Matrix y;
  std::vector<WeightPtr> weights;  // identity, mass, h1
};

CornerSetup make_setup(const ExperimentConfig& cfg, bool include_identity) {
  CornerSetup s;
  s.grid_n = cfg.grid_n > 0 ? cfg.grid_n : 100;
  s.y = corner_snapshots(s.grid_n, 25);
  FemWeights fw = build_fem_weights(s.grid_n);
  if (include_identity)
    s.weights.push_back(std::make_shared<const WeightOperator>(
        WeightOperator::identity(s.grid_n * s.grid_n)));
  s.weights.push_back(std::make_shared<const WeightOperator>(std::move(fw.mass)));
  s.weights.push_back(std::make_shared<const WeightOperator>(std::move(fw.h1)));
  return s;
}

}  // namespace

ErrorReport run_example3(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(cfg.out_dir);
  CornerSetup setup = make_setup(cfg, true);
  const Index r_max = cfg.rank > 0 ? cfg.rank : 40;

  std::vector<PodBasis> bases;
  for (const auto& w : setup.weights)
    bases.push_back(pod_basis(setup.y, w, RankSpec::fixed(r_max)));

  ErrorReport report;
  std::vector<std::vector<double>> rows;
  for (Index r = 5; r <= r_max; r += 5) {
    std::vector<double> row{static_cast<double>(r)};
    std::vector<double> constants;
    for (size_t wi = 0; wi < setup.weights.size(); ++wi) {
      PodBasis basis = slice_basis(bases[wi], r);
      SelectionOperator sel = select(basis.u_euclid, cfg.strategy, cfg.eta);
      DeimProjector proj = build_wdeim_generalized(basis, sel, setup.weights[wi]);
      const double err = sweep_test_grid(
          setup.grid_n, 11, proj, proj.error_constant(), *setup.weights[wi],
          [&](const Vector& f) { return pod_project(basis, f); });
      row.push_back(err);
      constants.push_back(proj.error_constant());
      const std::string key = "w" + std::to_string(wi + 1);
      if (r == 5) report.metrics["err_first_" + key] = err;
      if (r == r_max) {
        report.metrics["err_last_" + key] = err;
        report.metrics["const_last_" + key] = proj.error_constant();
      }
    }
    for (double c : constants) row.push_back(c);
    rows.push_back(std::move(row));
  }
  const std::string csv = cfg.out_dir + "/example3_errors.csv";
  write_csv(csv, "r,maxrelerr_w1,maxrelerr_w2,maxrelerr_w3,const_w1,const_w2,const_w3",
            rows);
  report.csv_files = {csv};
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

ErrorReport run_example4(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(cfg.out_dir);
  CornerSetup setup = make_setup(cfg, false);  // W2 and W3 only
  const Index r_max = cfg.rank > 0 ? cfg.rank : 30;

  ErrorReport report;
  std::vector<std::vector<double>> rows;
  for (size_t wi = 0; wi < setup.weights.size(); ++wi) {
    const WeightPtr& w = setup.weights[wi];
    const double cond_w = w->condition_estimate();
    auto [delta, ws] = equilibrate(*w);
    const double cond_ws = ws.condition_estimate();
    const std::string key = "w" + std::to_string(wi + 2);
    report.metrics["cond_" + key] = cond_w;
    report.metrics["cond_scaled_" + key] = cond_ws;
    for (Index r = 10; r <= r_max; r += 10) {
      // Method 1: Algorithm-1 basis, srrqr on U_r, generalized projector
      PodBasis b1 = pod_basis(setup.y, w, RankSpec::fixed(r));
      SelectionOperator sel1 = select_srrqr(b1.u_euclid, cfg.eta);
      DeimProjector m1 = build_wdeim_generalized(b1, sel1, w);
      const double err1 = sweep_test_grid(
          setup.grid_n, 11, m1, m1.error_constant(), *w,
          [&](const Vector& f) { return pod_project(b1, f); });
      // Methods 2 and 3: pointwise and scaled-pointwise projectors
      DeimProjector m2 = build_wdeim_pointwise(setup.y, w, RankSpec::fixed(r), cfg.eta);
      const double err2 =
          sweep_test_grid(setup.grid_n, 11, m2, m2.error_constant(), *w,
                          [&](const Vector& f) { return m2.pod_project(f); });
      DeimProjector m3 = build_wdeim_scaled(setup.y, w, RankSpec::fixed(r), cfg.eta);
      const double err3 =
          sweep_test_grid(setup.grid_n, 11, m3, m3.error_constant(), *w,
                          [&](const Vector& f) { return m3.pod_project(f); });
      const bool same_sel = m2.selection().indices == m3.selection().indices;
      if (same_sel && cond_ws <= cond_w &&
          m3.error_constant() > m2.error_constant() * (1.0 + 1e-10))
        throw NumericalError("example4: eta3 > eta2 despite kappa2(W_s) <= kappa2(W)");
      rows.push_back({static_cast<double>(wi + 2), static_cast<double>(r),
                      m1.error_constant(), m2.error_constant(), m3.error_constant(),
                      err1, err2, err3, cond_w, cond_ws,
                      same_sel ? 1.0 : 0.0});
      if (r == r_max) {
        report.metrics["eta1_" + key] = m1.error_constant();
        report.metrics["eta2_" + key] = m2.error_constant();
        report.metrics["eta3_" + key] = m3.error_constant();
        report.metrics["err1_" + key] = err1;
        report.metrics["err2_" + key] = err2;
        report.metrics["err3_" + key] = err3;
        report.metrics["same_selection_" + key] = same_sel ? 1.0 : 0.0;
      }
    }
  }
  const std::string csv = cfg.out_dir + "/example4_constants.csv";
  write_csv(csv,
            "weight,r,eta1,eta2,eta3,maxerr1,maxerr2,maxerr3,cond_w,cond_ws,"
            "same_selection",
            rows);
  report.csv_files = {csv};
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace deimkit
