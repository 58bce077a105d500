#include "antiplane/qvi_solver.hpp"

#include <cmath>
#include <sstream>

namespace antiplane {

std::vector<double> contact_thresholds(const Mesh& mesh, const FrictionBound& g, const ScalarField& eta) {
  const auto& nodes = mesh.tagged_nodes(BoundaryTag::Gamma3);
  std::vector<double> t(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k)
    t[k] = mesh.contact_weights()[k] * g(mesh.node(nodes[k]), std::abs(eta[nodes[k]]));
  return t;
}

std::vector<double> contact_multipliers(const Mesh& mesh, const SparseMatrix& stiffness, const Vector& load,
                                        const ScalarField& u) {
  const Vector residual = stiffness * u - load;
  const auto& nodes = mesh.tagged_nodes(BoundaryTag::Gamma3);
  std::vector<double> lambda(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) lambda[k] = residual[nodes[k]] / mesh.contact_weights()[k];
  return lambda;
}

QviSolver::QviSolver(std::shared_ptr<const Mesh> mesh, const CoefficientField& mu, double mu_star,
                     ConstantsReport constants)
    : mesh_(mesh),
      mu_star_(mu_star),
      constants_(std::move(constants)),
      norms_(*mesh),
      tresca_(mesh, assemble_stiffness(*mesh, mu, mu_star)) {}

QviResult QviSolver::solve(const Vector& load, const FrictionBound& g, const SolverConfig& config) const {
  const Mesh& m = mesh();
  QviResult result;
  SolveReport& report = result.report;
  const auto margin = smallness_margin(g.lipschitz(), constants_.c0, constants_.c3, mu_star_);
  report.contraction_bound = margin.k;
  report.contractive = margin.ok;
  if (!margin.ok) {
    std::ostringstream msg;
    msg << "smallness condition fails: L_g c0^2 c3^2 / mu_star = " << margin.k << " >= 1";
    if (!config.allow_noncontractive) throw InvalidInput(msg.str());
    report.warnings.push_back(msg.str() + "; fixed-point convergence is not guaranteed");
  }

  ScalarField eta = ScalarField::Zero(static_cast<Eigen::Index>(m.node_count()));
  for (;;) {
    if (report.outer_iterations >= config.max_outer) {
      const double last = report.increments.empty() ? 0.0 : report.increments.back();
      std::ostringstream msg;
      msg << "fixed-point iteration exceeded " << config.max_outer << " outer iterations (last increment " << last
          << ")";
      throw SolverError(msg.str(), last);
    }
    const auto thresholds = contact_thresholds(m, g, eta);
    TrescaResult inner = tresca_.solve(load, thresholds, config.inner_tolerance, config.max_inner, &eta);
    const double increment = norms_.norm(inner.u - eta);
    if (!report.increments.empty() && report.increments.back() > 0.0) {
      const double ratio = increment / report.increments.back();
      report.ratios.push_back(ratio);
      if (margin.ok && ratio > margin.k + config.ratio_slack) report.ratio_bound_respected = false;
    }
    report.increments.push_back(increment);
    report.inner_sweeps.push_back(inner.sweeps);
    ++report.outer_iterations;
    eta = std::move(inner.u);
    if (increment < config.outer_tolerance) break;
  }
  if (!report.ratio_bound_respected)
    report.warnings.push_back("observed contraction ratio exceeded k + slack");

  if (config.check_membership) {
    report.final_violation = membership_violation(m, stiffness(), norms_, eta, 0.0, load, g,
                                                  standard_directions(m, eta, config.seed));
  }
  result.u = std::move(eta);
  return result;
}

QviResult solve_qvi(const ProblemData& problem, const SolverConfig& config) {
  if (!problem.mesh) throw InvalidInput("problem has no mesh");
  const Mesh& mesh = *problem.mesh;
  std::vector<std::string> warnings;
  const Vector load = assemble_load(mesh, problem.f0, problem.f2, &warnings);
  QviSolver solver(problem.mesh, problem.mu, problem.mu_star, compute_constants(mesh));
  QviResult result = solver.solve(load, problem.g, config);
  result.report.warnings.insert(result.report.warnings.begin(), warnings.begin(), warnings.end());
  return result;
}

}  // namespace antiplane
