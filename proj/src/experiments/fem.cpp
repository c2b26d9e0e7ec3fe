#include "deimkit/fem.hpp"

#include <cmath>

#include <Eigen/SparseLU>

namespace deimkit {

namespace {

using Triplet = Eigen::Triplet<double>;

SparseMatrix from_tridiagonal(Index n, double d_first, double d_inner,
                              double d_last, double off_lower, double off_upper) {
  std::vector<Triplet> trip;
  trip.reserve(static_cast<size_t>(3 * n));
  for (Index i = 0; i < n; ++i) {
    const double d = i == 0 ? d_first : (i == n - 1 ? d_last : d_inner);
    trip.emplace_back(i, i, d);
    if (i + 1 < n) {
      trip.emplace_back(i + 1, i, off_lower);
      trip.emplace_back(i, i + 1, off_upper);
    }
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

void check_grid(Index n) {
  if (n < 2) throw ConfigError("fem: grid needs at least 2 nodes per side");
}

}  // namespace

SparseMatrix fem_mass_1d(Index n) {
  check_grid(n);
  const double h = 1.0 / static_cast<double>(n - 1);
  return from_tridiagonal(n, h / 3.0, 2.0 * h / 3.0, h / 3.0, h / 6.0, h / 6.0);
}

SparseMatrix fem_stiffness_1d(Index n) {
  check_grid(n);
  const double h = 1.0 / static_cast<double>(n - 1);
  return from_tridiagonal(n, 1.0 / h, 2.0 / h, 1.0 / h, -1.0 / h, -1.0 / h);
}

SparseMatrix fem_convection_1d(Index n) {
  check_grid(n);
  // element matrix [[-1/2, 1/2], [-1/2, 1/2]] for integral phi_j' phi_i
  return from_tridiagonal(n, -0.5, 0.0, 0.5, -0.5, 0.5);
}

SparseMatrix sparse_kron(const SparseMatrix& a, const SparseMatrix& b) {
  std::vector<Triplet> trip;
  trip.reserve(static_cast<size_t>(a.nonZeros()) * static_cast<size_t>(b.nonZeros()));
  for (Index ka = 0; ka < a.outerSize(); ++ka)
    for (SparseMatrix::InnerIterator ita(a, ka); ita; ++ita)
      for (Index kb = 0; kb < b.outerSize(); ++kb)
        for (SparseMatrix::InnerIterator itb(b, kb); itb; ++itb)
          trip.emplace_back(ita.row() * b.rows() + itb.row(),
                            ita.col() * b.cols() + itb.col(),
                            ita.value() * itb.value());
  SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

FemWeights build_fem_weights(Index grid_n) {
  SparseMatrix m1 = fem_mass_1d(grid_n);
  SparseMatrix k1 = fem_stiffness_1d(grid_n);
  SparseMatrix mass = sparse_kron(m1, m1);
  SparseMatrix stiff = sparse_kron(m1, k1) + sparse_kron(k1, m1);
  SparseMatrix h1 = mass + stiff;
  return FemWeights{WeightOperator::sparse_spd(std::move(mass)),
                    WeightOperator::sparse_spd(std::move(h1))};
}

AdvectionDiffusionOp assemble_advection_diffusion(Index grid_n, double bx, double by) {
  SparseMatrix m1 = fem_mass_1d(grid_n);
  SparseMatrix k1 = fem_stiffness_1d(grid_n);
  SparseMatrix c1 = fem_convection_1d(grid_n);
  AdvectionDiffusionOp op;
  op.mass = sparse_kron(m1, m1);
  op.a = sparse_kron(m1, k1) + sparse_kron(k1, m1);
  if (bx != 0.0) op.a += bx * sparse_kron(m1, c1);
  if (by != 0.0) op.a += by * sparse_kron(c1, m1);
  return op;
}

Vector gaussian_source(Index grid_n, double cx, double cy, double spread) {
  check_grid(grid_n);
  if (spread <= 0.0) throw ConfigError("gaussian_source: spread must be positive");
  const double h = 1.0 / static_cast<double>(grid_n - 1);
  const double denom = 2.0 * spread * spread;
  Vector s(grid_n * grid_n);
  for (Index iy = 0; iy < grid_n; ++iy)
    for (Index ix = 0; ix < grid_n; ++ix) {
      const double dx = static_cast<double>(ix) * h - cx;
      const double dy = static_cast<double>(iy) * h - cy;
      s(ix + grid_n * iy) = std::exp(-(dx * dx + dy * dy) / denom);
    }
  return s;
}

Vector solve_neumann(const SparseMatrix& a, const SparseMatrix& mass,
                     const Vector& rhs) {
  const Index m = a.rows();
  if (mass.rows() != m || rhs.size() != m)
    throw ConfigError("solve_neumann: dimension mismatch");
  Vector me = mass * Vector::Ones(m);
  std::vector<Triplet> trip;
  trip.reserve(static_cast<size_t>(a.nonZeros() + 2 * m));
  for (Index k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
      trip.emplace_back(it.row(), it.col(), it.value());
  for (Index i = 0; i < m; ++i) {
    trip.emplace_back(i, m, me(i));
    trip.emplace_back(m, i, me(i));
  }
  SparseMatrix bordered(m + 1, m + 1);
  bordered.setFromTriplets(trip.begin(), trip.end());
  bordered.makeCompressed();
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(bordered);
  if (lu.info() != Eigen::Success)
    throw NumericalError("solve_neumann: bordered factorization failed");
  Vector full_rhs(m + 1);
  full_rhs.head(m) = rhs;
  full_rhs(m) = 0.0;
  Vector sol = lu.solve(full_rhs);
  if (lu.info() != Eigen::Success || !sol.allFinite())
    throw NumericalError("solve_neumann: solve failed");
  return sol.head(m);
}

}  // namespace deimkit
