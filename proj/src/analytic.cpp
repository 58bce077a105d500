#include "antiplane/analytic.hpp"

#include <Eigen/SparseCholesky>

namespace antiplane {

namespace {

void check_data(double mu, double g) {
  if (!(mu > 0.0)) throw InvalidInput("mu must be positive");
  if (!(g > 0.0)) throw InvalidInput("g must be positive");
}

}  // namespace

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::SlipNegativeFlux: return "slip_negative_flux";
    case Regime::Stick: return "stick";
    case Regime::SlipPositiveFlux: return "slip_positive_flux";
  }
  return "?";
}

Regime regime_of(double mu, double f0, double g) {
  check_data(mu, g);
  const double threshold = 2.0 * mu * g;
  if (f0 < -threshold) return Regime::SlipNegativeFlux;
  if (f0 > threshold) return Regime::SlipPositiveFlux;
  return Regime::Stick;
}

double analytic_1d(double mu, double f0, double g, double x) {
  const double quad = -f0 / (2.0 * mu) * x * x;
  switch (regime_of(mu, f0, g)) {
    case Regime::SlipNegativeFlux: return quad + (f0 / mu + g) * x;
    case Regime::Stick: return quad + f0 / (2.0 * mu) * x;
    case Regime::SlipPositiveFlux: return quad + (f0 / mu - g) * x;
  }
  return 0.0;
}

double analytic_1d_derivative(double mu, double f0, double g, double x) {
  const double quad = -f0 / mu * x;
  switch (regime_of(mu, f0, g)) {
    case Regime::SlipNegativeFlux: return quad + f0 / mu + g;
    case Regime::Stick: return quad + f0 / (2.0 * mu);
    case Regime::SlipPositiveFlux: return quad + f0 / mu - g;
  }
  return 0.0;
}

ProblemData example_1d_problem(double mu, double f0, double g, int elements) {
  check_data(mu, g);
  MeshSpec spec;
  spec.dimension = 1;
  spec.extents = {1.0, 1.0};
  spec.resolution = {elements, 1};
  spec.partition = {{Side::Left, BoundaryTag::Gamma1}, {Side::Right, BoundaryTag::Gamma3}};
  ProblemData problem;
  problem.mesh = std::make_shared<const Mesh>(build_mesh(spec));
  problem.mu = CoefficientField::constant(mu);
  problem.mu_star = mu;
  problem.f0 = CoefficientField::constant(f0);
  problem.f2 = CoefficientField::constant(0.0);
  problem.g = FrictionBound::constant(mu * g);
  return problem;
}

ScalarField linear_solve(const Mesh& mesh, const CoefficientField& mu, double mu_star, const CoefficientField& f0,
                         const CoefficientField& f2) {
  const SparseMatrix k = restrict_matrix(mesh, assemble_stiffness(mesh, mu, mu_star));
  const Vector load = restrict_to_free(mesh, assemble_load(mesh, f0, f2));
  Eigen::SimplicialLDLT<SparseMatrix> solver(k);
  if (solver.info() != Eigen::Success) throw SolverError("linear_solve: factorization failed");
  const Vector u = solver.solve(load);
  return extend_from_free(mesh, u);
}

}  // namespace antiplane
