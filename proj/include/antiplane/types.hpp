#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace antiplane {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Nodal coefficient array of a piecewise-linear field. Elements of V vanish
/// on every Gamma1 node.
using ScalarField = Eigen::VectorXd;

/// Point in the cross-section. 1D meshes only use the first coordinate.
using Point = std::array<double, 2>;

/// Malformed input or violated data assumption.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative method hit its cap or a factorization failed.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what, double last_residual = 0.0)
      : std::runtime_error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

}  // namespace antiplane
