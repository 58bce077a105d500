#include "antiplane/qvi_solver.hpp"

#include <algorithm>
#include <cmath>

#include "antiplane/rng.hpp"

namespace antiplane {

DirectionSet standard_directions(const Mesh& mesh, const ScalarField& u, std::uint64_t seed, int random_count) {
  DirectionSet set;
  const auto n = static_cast<Eigen::Index>(mesh.node_count());
  const double amplitude = std::max(1.0, u.cwiseAbs().maxCoeff());
  Rng rng(seed);
  set.fields.reserve(static_cast<std::size_t>(random_count) + 2);
  for (int r = 0; r < random_count; ++r) {
    ScalarField v = ScalarField::Zero(n);
    for (int node : mesh.free_nodes()) v[node] = rng.uniform(-2.0, 2.0) * amplitude;
    set.fields.push_back(std::move(v));
  }
  set.fields.push_back(ScalarField::Zero(n));
  set.fields.push_back(2.0 * u);
  return set;
}

double membership_violation(const Mesh& mesh, const SparseMatrix& stiffness, const NormOperator& norms,
                            const ScalarField& u, double eps, const Vector& load, const FrictionBound& g,
                            const DirectionSet& directions) {
  if (eps < 0.0) throw InvalidInput("eps must be nonnegative");
  const Vector residual = load - stiffness * u;
  const Vector gram_u = norms.gram() * u;
  const double u_norm_sq = std::max(0.0, u.dot(gram_u));
  const double u_norm = std::sqrt(u_norm_sq);
  const double r_dot_u = residual.dot(u);

  const auto thresholds = contact_thresholds(mesh, g, u);
  const auto& contact = mesh.tagged_nodes(BoundaryTag::Gamma3);
  std::vector<double> node_threshold(mesh.node_count(), 0.0);
  double j_uu = 0.0;
  for (std::size_t k = 0; k < contact.size(); ++k) {
    node_threshold[contact[k]] = thresholds[k];
    j_uu += thresholds[k] * std::abs(u[contact[k]]);
  }

  double worst = 0.0;
  for (const ScalarField& v : directions.fields) {
    const ScalarField d = v - u;
    double j_uv = 0.0;
    for (std::size_t k = 0; k < contact.size(); ++k) j_uv += thresholds[k] * std::abs(v[contact[k]]);
    const double value = residual.dot(d) - (j_uv - j_uu) - eps * u_norm * norms.norm(d);
    worst = std::max(worst, value);
  }

  if (directions.basis) {
    const double s = directions.basis_scale;
    const SparseMatrix& gram = norms.gram();
    for (int i : mesh.free_nodes()) {
      const double g_ii = gram.coeff(i, i);
      const double t = node_threshold[i];
      for (double sigma : {1.0, -1.0}) {
        // v = u + sigma s e_i
        const double dj_near = t * (std::abs(u[i] + sigma * s) - std::abs(u[i]));
        const double near = sigma * s * residual[i] - dj_near - eps * u_norm * s * std::sqrt(g_ii);
        // v = sigma s e_i
        const double dist_sq = s * s * g_ii - 2.0 * sigma * s * gram_u[i] + u_norm_sq;
        const double dj_far = t * s - j_uu;
        const double far = sigma * s * residual[i] - r_dot_u - dj_far - eps * u_norm * std::sqrt(std::max(0.0, dist_sq));
        worst = std::max({worst, near, far});
      }
    }
  }
  return worst;
}

double membership_violation(const ProblemData& problem, const ScalarField& u, const TykhonovIndex& theta,
                            const DirectionSet& directions) {
  const Mesh& mesh = *problem.mesh;
  const SparseMatrix stiffness = assemble_stiffness(mesh, problem.mu, problem.mu_star);
  const Vector load = assemble_load(mesh, theta.f0, theta.f2);
  return membership_violation(mesh, stiffness, NormOperator(mesh), u, theta.eps, load, theta.g, directions);
}

}  // namespace antiplane
