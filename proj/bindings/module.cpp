#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "deimkit/deim.hpp"
#include "deimkit/experiments.hpp"
#include "deimkit/fem.hpp"

namespace py = pybind11;
using namespace deimkit;

namespace {

WeightPtr weight_from(const py::object& obj, Index m) {
  if (obj.is_none())
    return std::make_shared<const WeightOperator>(WeightOperator::identity(m));
  auto arr = py::array_t<double, py::array::c_style | py::array::forcecast>(obj);
  if (arr.ndim() == 1) {
    Vector d(arr.shape(0));
    for (Index i = 0; i < d.size(); ++i) d(i) = arr.at(i);
    return std::make_shared<const WeightOperator>(WeightOperator::diagonal(std::move(d)));
  }
  if (arr.ndim() == 2) {
    Matrix w(arr.shape(0), arr.shape(1));
    for (Index i = 0; i < w.rows(); ++i)
      for (Index j = 0; j < w.cols(); ++j) w(i, j) = arr.at(i, j);
    return std::make_shared<const WeightOperator>(WeightOperator::dense_spd(w));
  }
  throw ConfigError("weight must be None, a diagonal vector, or a dense SPD matrix");
}

RankSpec rank_spec(Index rank, double tol) {
  if (rank > 0) return RankSpec::fixed(rank);
  return RankSpec::energy(tol > 0.0 ? tol : 1e-8);
}

}  // namespace

PYBIND11_MODULE(_deimkit, mod) {
  mod.doc() = "DEIM/W-DEIM model order reduction in weighted inner-product spaces";

  py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(mod, "NumericalError", PyExc_ArithmeticError);

  py::class_<CanonicalStructure>(mod, "CanonicalStructure")
      .def_readonly("ell", &CanonicalStructure::ell)
      .def_readonly("p", &CanonicalStructure::p)
      .def_readonly("angles", &CanonicalStructure::angles)
      .def_readonly("norm_d", &CanonicalStructure::norm_d);

  py::class_<DeimProjector>(mod, "Projector")
      .def_property_readonly("variant",
                             [](const DeimProjector& d) { return std::string(to_string(d.variant())); })
      .def_property_readonly("rank", &DeimProjector::rank)
      .def_property_readonly("dim", &DeimProjector::dim)
      .def_property_readonly("indices",
                             [](const DeimProjector& d) { return d.selection().indices; })
      .def_property_readonly("kappa",
                             [](const DeimProjector& d) { return d.selection().kappa; })
      .def_property_readonly("error_constant", &DeimProjector::error_constant)
      .def_property_readonly("interpolation_holds", &DeimProjector::interpolation_holds)
      .def_property_readonly("projection_holds", &DeimProjector::projection_holds)
      .def("apply", &DeimProjector::apply, py::arg("f"))
      .def("apply_sampled", &DeimProjector::apply_sampled, py::arg("sampled"))
      .def("assemble", &DeimProjector::assemble)
      .def("canonical", [](const DeimProjector& d) { return canonical_analysis(d); })
      .def("error_decomposition", [](const DeimProjector& d, const Vector& f) {
        ErrorDecomposition e = error_decomposition(d, f);
        return py::dict(py::arg("orth_err") = e.orth_err,
                        py::arg("oblique_excess") = e.oblique_excess,
                        py::arg("kappa_prime") = e.kappa_prime,
                        py::arg("total") = e.total);
      });

  mod.def(
      "pod",
      [](const Matrix& y, const py::object& weight, Index rank, double tol) {
        PodBasis b = pod_basis(y, weight_from(weight, y.rows()), rank_spec(rank, tol));
        return py::make_tuple(b.u_hat, b.u_euclid, b.sigma, b.rank);
      },
      py::arg("y"), py::arg("weight") = py::none(), py::arg("rank") = 0,
      py::arg("tol") = 0.0,
      "Weighted POD; returns (u_hat, u_euclid, sigma, rank).");

  mod.def(
      "select",
      [](const Matrix& u, const std::string& strategy, double eta) {
        SelectionOperator sel = select(u, selection_strategy_from_string(strategy), eta);
        return py::make_tuple(sel.indices, sel.kappa);
      },
      py::arg("u"), py::arg("strategy") = "srrqr", py::arg("eta") = 2.0,
      "Index selection on an orthonormal basis; returns (indices, kappa).");

  mod.def(
      "build_deim",
      [](const Matrix& u, const std::vector<Index>& indices) {
        SelectionOperator sel;
        sel.m = u.rows();
        sel.indices = indices;
        sel.kappa = subset_kappa(u, indices);
        return build_deim(u, sel);
      },
      py::arg("u"), py::arg("indices"));

  mod.def(
      "build_wdeim_generalized",
      [](const Matrix& y, const py::object& weight, Index rank, double tol,
         double eta) {
        WeightPtr w = weight_from(weight, y.rows());
        PodBasis basis = pod_basis(y, w, rank_spec(rank, tol));
        SelectionOperator sel = select_srrqr(basis.u_euclid, eta);
        return build_wdeim_generalized(basis, sel, w);
      },
      py::arg("y"), py::arg("weight") = py::none(), py::arg("rank") = 0,
      py::arg("tol") = 0.0, py::arg("eta") = 2.0);

  mod.def(
      "build_wdeim_pointwise",
      [](const Matrix& y, const py::object& weight, Index rank, double tol,
         double eta) {
        return build_wdeim_pointwise(y, weight_from(weight, y.rows()),
                                     rank_spec(rank, tol), eta);
      },
      py::arg("y"), py::arg("weight") = py::none(), py::arg("rank") = 0,
      py::arg("tol") = 0.0, py::arg("eta") = 2.0);

  mod.def(
      "build_wdeim_scaled",
      [](const Matrix& y, const py::object& weight, Index rank, double tol,
         double eta) {
        return build_wdeim_scaled(y, weight_from(weight, y.rows()),
                                  rank_spec(rank, tol), eta);
      },
      py::arg("y"), py::arg("weight") = py::none(), py::arg("rank") = 0,
      py::arg("tol") = 0.0, py::arg("eta") = 2.0);

  mod.def(
      "srrqr",
      [](const Matrix& a, Index target_rank, double eta) {
        SrrqrResult res = srrqr(a, target_rank, eta);
        return py::make_tuple(res.pivoted_qr.perm, res.swap_count);
      },
      py::arg("a"), py::arg("target_rank"), py::arg("eta") = 2.0,
      "Strong rank-revealing QR; returns (column permutation, swap count).");

  mod.def("fem_weights", [](Index grid_n) {
    FemWeights fw = build_fem_weights(grid_n);
    return py::make_tuple(Matrix(fw.mass.dense()), Matrix(fw.h1.dense()));
  });

  mod.def(
      "run_example",
      [](int example_id, const std::string& out_dir, std::uint64_t seed, bool small,
         Index grid_n, double eta, const std::string& strategy) {
        ExperimentConfig cfg;
        cfg.example_id = example_id;
        cfg.out_dir = out_dir;
        cfg.seed = seed;
        cfg.small = small;
        cfg.grid_n = grid_n;
        cfg.eta = eta;
        cfg.strategy = selection_strategy_from_string(strategy);
        ErrorReport report = run_example(cfg);
        py::dict metrics;
        for (const auto& [key, value] : report.metrics)
          metrics[py::str(key)] = value;
        return py::make_tuple(report.csv_files, metrics);
      },
      py::arg("example_id"), py::arg("out_dir"), py::arg("seed") = 0,
      py::arg("small") = false, py::arg("grid_n") = 0, py::arg("eta") = 2.0,
      py::arg("strategy") = "srrqr");
}
