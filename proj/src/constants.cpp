#include "antiplane/constants.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "antiplane/rng.hpp"

namespace antiplane {

namespace {

Vector random_start(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.uniform(0.5, 1.5);
  return x;
}

/// Dominant eigenpair of lhs v = lambda rhs v by power iteration on rhs^{-1} lhs,
/// with rhs symmetric positive definite and lhs symmetric positive semidefinite.
EigenEstimate dominant_eigenpair(const Mesh& mesh, const SparseMatrix& lhs, const SparseMatrix& rhs,
                                 const PowerIterationOptions& options, const char* label) {
  Eigen::SimplicialLLT<SparseMatrix> chol(rhs);
  if (chol.info() != Eigen::Success) throw SolverError(std::string(label) + ": Cholesky factorization failed");

  Vector x = random_start(rhs.rows(), options.seed);
  x /= std::sqrt(x.dot(rhs * x));
  double lambda = x.dot(lhs * x);
  double residual = 0.0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    Vector y = chol.solve(lhs * x);
    const double scale = std::sqrt(y.dot(rhs * y));
    if (!(scale > 0.0)) throw SolverError(std::string(label) + ": power iteration collapsed to zero");
    x = y / scale;
    const double next = x.dot(lhs * x);
    const Vector r = lhs * x - next * (rhs * x);
    residual = r.norm();
    const bool done = std::abs(next - lambda) <= options.tolerance * std::abs(next);
    lambda = next;
    if (done) return {std::sqrt(lambda), extend_from_free(mesh, x), it, residual};
  }
  std::ostringstream msg;
  msg << label << ": power iteration did not converge in " << options.max_iterations
      << " iterations (residual " << residual << ")";
  throw SolverError(msg.str(), residual);
}

}  // namespace

EigenEstimate poincare_constant(const Mesh& mesh, const PowerIterationOptions& options) {
  if (mesh.tagged_nodes(BoundaryTag::Gamma1).empty()) throw InvalidInput("Poincare constant needs Gamma1");
  const NormOperator norms(mesh);
  const SparseMatrix gram = restrict_matrix(mesh, norms.gram());
  const SparseMatrix stiffness = restrict_matrix(mesh, norms.gradient_stiffness());
  return dominant_eigenpair(mesh, gram, stiffness, options, "poincare_constant");
}

EigenEstimate trace_constant(const Mesh& mesh, const PowerIterationOptions& options) {
  const auto& contact = mesh.tagged_nodes(BoundaryTag::Gamma3);
  if (contact.empty()) return {0.0, ScalarField::Zero(static_cast<Eigen::Index>(mesh.node_count())), 0, 0.0};
  const NormOperator norms(mesh);
  const SparseMatrix gram = restrict_matrix(mesh, norms.gram());
  const auto n = static_cast<Eigen::Index>(mesh.free_nodes().size());
  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t k = 0; k < contact.size(); ++k) {
    const int i = mesh.free_index(static_cast<std::size_t>(contact[k]));
    entries.emplace_back(i, i, mesh.contact_weights()[k]);
  }
  SparseMatrix boundary_mass(n, n);
  boundary_mass.setFromTriplets(entries.begin(), entries.end());
  return dominant_eigenpair(mesh, boundary_mass, gram, options, "trace_constant");
}

ConstantsReport compute_constants(const Mesh& mesh, const PowerIterationOptions& options) {
  auto c0 = poincare_constant(mesh, options);
  auto c3 = trace_constant(mesh, options);
  return {c0.constant, c3.constant, std::move(c0.field), std::move(c3.field)};
}

SmallnessMargin smallness_margin(double lipschitz, double c0, double c3, double mu_star) {
  if (!(mu_star > 0.0)) throw InvalidInput("mu_star must be positive");
  if (lipschitz < 0.0) throw InvalidInput("Lipschitz constant must be nonnegative");
  const double k = lipschitz * c0 * c0 * c3 * c3 / mu_star;
  return {k, k < 1.0};
}

double contact_l2_norm(const Mesh& mesh, const ScalarField& v) {
  const auto& contact = mesh.tagged_nodes(BoundaryTag::Gamma3);
  double total = 0.0;
  for (std::size_t k = 0; k < contact.size(); ++k) total += mesh.contact_weights()[k] * v[contact[k]] * v[contact[k]];
  return std::sqrt(total);
}

}  // namespace antiplane
