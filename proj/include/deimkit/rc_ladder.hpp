#pragma once

#include "deimkit/types.hpp"

namespace deimkit {

enum class Integrator { ImplicitEuler, Trapezoidal };

/// Nonlinear RC-ladder benchmark D dx/dt = F(x) + e_1 u(t),
/// g(x) = exp(40 x) + x - 1, driven by u(t) = exp(-t).
struct RcLadderConfig {
  Index n = 1000;
  double t_end = 7.0;
  Index steps = 2000;
  double newton_tol = 1e-10;
  Index newton_max_iter = 50;
  Integrator integrator = Integrator::ImplicitEuler;
  // D_ii = 1 for i in [d_lo, d_hi] (0-based, inclusive), 1/2 elsewhere
  Index d_lo = 250;
  Index d_hi = 749;
};

double rc_g(double x);
double rc_g_prime(double x);
double rc_input(double t);  // exp(-t)

Vector rc_weights(const RcLadderConfig& cfg);           // diag of D
Vector rc_nonlinearity(const Vector& x);                // F(x) without the input
SparseMatrix rc_jacobian(const Vector& x);              // dF/dx, tridiagonal

/// Trajectory columns x(t_0) .. x(t_steps), x(0) = 0, t_k = k t_end/steps.
Matrix solve_rc_ladder_full(const RcLadderConfig& cfg);

}  // namespace deimkit
