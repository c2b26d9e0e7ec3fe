#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <stdexcept>
#include <string>

namespace deimkit {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Bad input: shapes, flags, file contents, parameter ranges. CLI exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical breakdown: loss of rank, indefiniteness, divergence. CLI exit code 3.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require_finite(const Matrix& a, const char* name) {
  if (!a.allFinite())
    throw ConfigError(std::string(name) + ": non-finite entries");
}

}  // namespace deimkit
