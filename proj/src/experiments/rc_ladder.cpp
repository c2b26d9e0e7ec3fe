#include "deimkit/rc_ladder.hpp"

#include <cmath>
#include <string>

#include <Eigen/SparseLU>

namespace deimkit {

double rc_g(double x) { return std::exp(40.0 * x) + x - 1.0; }
double rc_g_prime(double x) { return 40.0 * std::exp(40.0 * x) + 1.0; }
double rc_input(double t) { return std::exp(-t); }

Vector rc_weights(const RcLadderConfig& cfg) {
  if (cfg.n < 2) throw ConfigError("rc_ladder: need n >= 2");
  if (cfg.d_lo < 0 || cfg.d_hi < cfg.d_lo)
    throw ConfigError("rc_ladder: bad D-diagonal boundary");
  Vector d = Vector::Constant(cfg.n, 0.5);
  for (Index i = cfg.d_lo; i <= cfg.d_hi && i < cfg.n; ++i) d(i) = 1.0;
  return d;
}

Vector rc_nonlinearity(const Vector& x) {
  const Index n = x.size();
  Vector f(n);
  f(0) = -rc_g(x(0)) - rc_g(x(0) - x(1));
  for (Index i = 1; i + 1 < n; ++i)
    f(i) = rc_g(x(i - 1) - x(i)) - rc_g(x(i) - x(i + 1));
  f(n - 1) = rc_g(x(n - 2) - x(n - 1));
  return f;
}

SparseMatrix rc_jacobian(const Vector& x) {
  const Index n = x.size();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(3 * n));
  // row 0: -g'(x0) - g'(x0 - x1) wrt x0; +g'(x0 - x1) wrt x1
  const double gp01 = rc_g_prime(x(0) - x(1));
  trip.emplace_back(0, 0, -rc_g_prime(x(0)) - gp01);
  trip.emplace_back(0, 1, gp01);
  for (Index i = 1; i + 1 < n; ++i) {
    const double gl = rc_g_prime(x(i - 1) - x(i));
    const double gr = rc_g_prime(x(i) - x(i + 1));
    trip.emplace_back(i, i - 1, gl);
    trip.emplace_back(i, i, -gl - gr);
    trip.emplace_back(i, i + 1, gr);
  }
  const double gl = rc_g_prime(x(n - 2) - x(n - 1));
  trip.emplace_back(n - 1, n - 2, gl);
  trip.emplace_back(n - 1, n - 1, -gl);
  SparseMatrix j(n, n);
  j.setFromTriplets(trip.begin(), trip.end());
  return j;
}

Matrix solve_rc_ladder_full(const RcLadderConfig& cfg) {
  if (cfg.steps < 1) throw ConfigError("rc_ladder: need steps >= 1");
  const Index n = cfg.n;
  const double dt = cfg.t_end / static_cast<double>(cfg.steps);
  const Vector d = rc_weights(cfg);
  const bool trapezoid = cfg.integrator == Integrator::Trapezoidal;
  const double theta = trapezoid ? 0.5 : 1.0;
  Matrix traj = Matrix::Zero(n, cfg.steps + 1);
  Vector x = Vector::Zero(n);
  Eigen::SparseLU<SparseMatrix> lu;
  for (Index k = 0; k < cfg.steps; ++k) {
    const double t0 = static_cast<double>(k) * dt;
    const double t1 = t0 + dt;
    Vector rhs_old = rc_nonlinearity(x);
    rhs_old(0) += rc_input(t0);
    Vector x_new = x;  // warm start
    bool converged = false;
    for (Index it = 0; it < cfg.newton_max_iter; ++it) {
      Vector f_new = rc_nonlinearity(x_new);
      f_new(0) += rc_input(t1);
      Vector residual = d.cwiseProduct(x_new - x) -
                        dt * (theta * f_new + (1.0 - theta) * rhs_old);
      if (residual.lpNorm<Eigen::Infinity>() <= cfg.newton_tol) {
        converged = true;
        break;
      }
      SparseMatrix j = (-dt * theta) * rc_jacobian(x_new);
      for (Index i = 0; i < n; ++i) j.coeffRef(i, i) += d(i);
      j.makeCompressed();
      lu.compute(j);
      if (lu.info() != Eigen::Success)
        throw NumericalError("rc_ladder: Newton Jacobian factorization failed at step " +
                             std::to_string(k + 1));
      Vector delta = lu.solve(residual);
      if (!delta.allFinite())
        throw NumericalError("rc_ladder: Newton solve failed at step " +
                             std::to_string(k + 1));
      x_new -= delta;
    }
    if (!converged)
      throw NumericalError("rc_ladder: Newton did not converge at step " +
                           std::to_string(k + 1) + " (t = " + std::to_string(t1) + ")");
    x = x_new;
    traj.col(k + 1) = x;
  }
  return traj;
}

}  // namespace deimkit
