#pragma once

#include "deimkit/weighting.hpp"

namespace deimkit {

// 1D linear-element matrices on n equispaced nodes over [0,1].
SparseMatrix fem_mass_1d(Index n);
SparseMatrix fem_stiffness_1d(Index n);
SparseMatrix fem_convection_1d(Index n);  // entries integral of phi_j' phi_i

SparseMatrix sparse_kron(const SparseMatrix& a, const SparseMatrix& b);

/// Tensor-grid FE matrices on grid_n x grid_n nodes over the unit square;
/// node index = ix + grid_n * iy.
struct FemWeights {
  WeightOperator mass;  // L^2
  WeightOperator h1;    // M + K
};
FemWeights build_fem_weights(Index grid_n);

struct AdvectionDiffusionOp {
  SparseMatrix a;     // K + bx Gx + by Gy, singular with null vector 1
  SparseMatrix mass;  // M
};
AdvectionDiffusionOp assemble_advection_diffusion(Index grid_n, double bx, double by);

/// Nodal values of exp(-((x-cx)^2 + (y-cy)^2) / (2 spread^2)).
Vector gaussian_source(Index grid_n, double cx, double cy, double spread);

/// Pure-Neumann solve via the bordered mean-zero system
/// [[A, Me],[(Me)^T, 0]] [u; lambda] = [rhs; 0], Me = M * ones.
Vector solve_neumann(const SparseMatrix& a, const SparseMatrix& mass,
                     const Vector& rhs);

}  // namespace deimkit
