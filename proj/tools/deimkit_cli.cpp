#include <cmath>
#include <filesystem>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "deimkit/deim.hpp"
#include "deimkit/experiments.hpp"
#include "deimkit/fem.hpp"
#include "deimkit/io.hpp"

namespace {

using namespace deimkit;

WeightPtr resolve_weight(const std::string& spec, Index m) {
  if (spec.empty() || spec == "identity")
    return std::make_shared<const WeightOperator>(WeightOperator::identity(m));
  if (spec == "mass" || spec == "h1") {
    const auto g = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(m))));
    if (g * g != m)
      throw ConfigError("--weight " + spec + " needs a square tensor-grid dimension");
    FemWeights fw = build_fem_weights(g);
    return std::make_shared<const WeightOperator>(
        spec == "mass" ? std::move(fw.mass) : std::move(fw.h1));
  }
  return std::make_shared<const WeightOperator>(read_weight(spec));
}

Matrix read_basis(const std::string& path) {
  Matrix u = read_snapshots(path);
  if (!is_orthonormal(u))
    throw ConfigError("basis file does not hold orthonormal columns: " + path);
  return u;
}

struct CliOptions {
  std::string snapshots, basis, selection_file, weight, out = ".";
  std::string strategy = "srrqr";
  std::string format = "csv";
  double eta = 2.0;
  double tol = 0.0;
  Index rank = 0;
  std::uint64_t seed = 0;
  Index grid = 0;
  int example_id = 1;
  bool small = false;
  bool paper_scale = false;
};

int run_pod(const CliOptions& o) {
  Matrix y = read_snapshots(o.snapshots);
  WeightPtr w = resolve_weight(o.weight, y.rows());
  RankSpec spec = o.rank > 0 ? RankSpec::fixed(o.rank)
                             : RankSpec::energy(o.tol > 0.0 ? o.tol : 1e-8);
  PodBasis basis = pod_basis(y, w, spec);
  std::filesystem::create_directories(o.out);
  write_snapshots(o.out + "/basis_uhat.txt", basis.u_hat);
  write_snapshots(o.out + "/basis_ueuclid.txt", basis.u_euclid);
  std::vector<std::vector<double>> rows;
  for (Index i = 0; i < basis.sigma.size(); ++i)
    rows.push_back({static_cast<double>(i + 1), basis.sigma(i)});
  write_csv(o.out + "/sigma.csv", "index,sigma", rows);
  std::cout << "pod: rank " << basis.rank << ", " << basis.sigma.size()
            << " singular values, output in " << o.out << "\n";
  return 0;
}

int run_select(const CliOptions& o) {
  Matrix u = read_basis(o.basis);
  SelectionOperator sel =
      select(u, selection_strategy_from_string(o.strategy), o.eta);
  std::filesystem::create_directories(o.out);
  write_selection(o.out + "/selection.txt", sel);
  std::cout << selection_line(sel) << "\n";
  std::cout << "kappa = " << format_double(sel.kappa) << "\n";
  return 0;
}

int run_project(const CliOptions& o) {
  Matrix u = read_basis(o.basis);
  SelectionOperator sel = read_selection(o.selection_file);
  WeightPtr w = resolve_weight(o.weight, u.rows());
  DeimProjector proj =
      w->kind() == WeightKind::Identity
          ? build_deim(u, sel)
          : [&] {
              PodBasis basis;
              basis.u_euclid = u;
              basis.u_hat = w->factor_t_solve(u);
              basis.rank = u.cols();
              basis.sigma = Vector::Ones(u.cols());
              basis.weight = w;
              return build_wdeim_generalized(basis, sel, w);
            }();
  Matrix f = read_snapshots(o.snapshots);
  std::filesystem::create_directories(o.out);
  Matrix df(f.rows(), f.cols());
  std::vector<std::vector<double>> rows;
  for (Index j = 0; j < f.cols(); ++j) {
    df.col(j) = proj.apply(f.col(j));
    const double fn = w->w_norm(f.col(j));
    rows.push_back({static_cast<double>(j + 1),
                    fn > 0.0 ? w->w_norm(f.col(j) - df.col(j)) / fn : 0.0});
  }
  write_snapshots(o.out + "/projected.txt", df);
  write_csv(o.out + "/project_errors.csv", "column,relerr_w", rows);
  write_projector(o.out + "/projector.txt", proj, o.basis);
  write_projector_diagnostics(o.out + "/projector_diag.csv", proj,
                              canonical_analysis(proj));
  std::cout << "project: " << f.cols() << " columns, errorConstant = "
            << format_double(proj.error_constant()) << "\n";
  return 0;
}

int run_bounds(const CliOptions& o) {
  Matrix u = read_basis(o.basis);
  SelectionOperator sel = read_selection(o.selection_file);
  const double kappa = subset_kappa(u, sel.indices);
  const auto r = static_cast<double>(u.cols());
  const auto m = static_cast<double>(u.rows());
  const double ceiling = std::sqrt(1.0 + o.eta * o.eta * r * (m - r));
  std::cout << "kappa = " << format_double(kappa) << "\n";
  std::cout << "lemma21_ceiling(eta=" << format_double(o.eta)
            << ") = " << format_double(ceiling) << "\n";
  return 0;
}

int run_example_cmd(const CliOptions& o) {
  ExperimentConfig cfg;
  cfg.example_id = o.example_id;
  cfg.seed = o.seed;
  cfg.out_dir = o.out;
  cfg.strategy = selection_strategy_from_string(o.strategy);
  cfg.eta = o.eta;
  cfg.small = o.small;
  cfg.paper_scale = o.paper_scale;
  cfg.grid_n = o.grid;
  cfg.rank = o.rank;
  ErrorReport report = run_example(cfg);
  for (const auto& f : report.csv_files) std::cout << "wrote " << f << "\n";
  for (const auto& [key, value] : report.metrics)
    std::cout << key << " = " << format_double(value) << "\n";
  std::cout << "wall_seconds = " << format_double(report.wall_seconds) << "\n";
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"deimkit: DEIM/W-DEIM model order reduction toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  app.set_config("--config");
  CliOptions o;

  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--format", o.format, "output format (csv)")
      ->check(CLI::IsMember({"csv"}));
  app.add_option("--eta", o.eta, "sRRQR tuning parameter (>= 1)");
  app.add_option("--strategy", o.strategy, "selection strategy")
      ->check(CLI::IsMember({"deim", "qdeim", "srrqr"}));
  app.add_option("--weight", o.weight, "weight: file path, identity, mass, or h1");
  app.add_flag("--small", o.small, "reduced-size preset");
  app.add_flag("--paper-scale", o.paper_scale, "full paper-scale training set");
  app.add_option("--grid", o.grid, "grid nodes per side override");
  app.add_option("--rank", o.rank, "basis rank override");
  app.add_option("--tol", o.tol, "energy truncation tolerance");

  auto* pod = app.add_subcommand("pod", "weighted POD of a snapshot file");
  pod->add_option("--snapshots", o.snapshots, "snapshot file")->required();
  auto* sel = app.add_subcommand("select", "index selection on an orthonormal basis");
  sel->add_option("--basis", o.basis, "basis file (Y format)")->required();
  auto* project = app.add_subcommand("project", "apply a DEIM projector");
  project->add_option("--basis", o.basis, "basis file")->required();
  project->add_option("--selection", o.selection_file, "selection file")->required();
  project->add_option("--snapshots", o.snapshots, "vectors to project")->required();
  auto* example = app.add_subcommand("example", "run a numerical experiment");
  example->add_option("id", o.example_id, "example id (1..5)")
      ->required()
      ->check(CLI::Range(1, 5));
  auto* bounds = app.add_subcommand("bounds", "kappa and its Lemma-2.1 ceiling");
  bounds->add_option("--basis", o.basis, "basis file")->required();
  bounds->add_option("--selection", o.selection_file, "selection file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    if (pod->parsed()) return run_pod(o);
    if (sel->parsed()) return run_select(o);
    if (project->parsed()) return run_project(o);
    if (example->parsed()) return run_example_cmd(o);
    if (bounds->parsed()) return run_bounds(o);
  } catch (const deimkit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const deimkit::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

int main(int argc, char** argv) { return cli_main(argc, argv); }
