#include <cmath>

#include <Eigen/SparseCholesky>
#include <gtest/gtest.h>

#include "antiplane/analytic.hpp"
#include "antiplane/qvi_solver.hpp"
#include "test_support.hpp"

namespace antiplane {
namespace {

using testing::interval;
using testing::random_field;
using testing::rectangle;
using testing::share;

ProblemData plate_problem(const FrictionBound& g) {
  ProblemData p;
  p.mesh = share(rectangle(8, 6, BoundaryTag::Gamma1, BoundaryTag::Gamma2, BoundaryTag::Gamma3, BoundaryTag::Gamma2));
  p.mu = CoefficientField::polynomial({1.0, 0.5});
  p.mu_star = 1.0;
  p.f0 = CoefficientField::constant(2.0);
  p.f2 = CoefficientField::constant(0.5);
  p.g = g;
  return p;
}

std::vector<double> zeros(std::size_t n) { return std::vector<double>(n, 0.0); }

TEST(Tresca, ZeroThresholdsReduceToLinearSolve) {
  const ProblemData p = plate_problem(FrictionBound::constant(0.0));
  const SparseMatrix k = assemble_stiffness(*p.mesh, p.mu, p.mu_star);
  const Vector f = assemble_load(*p.mesh, p.f0, p.f2);
  const ScalarField u = solve_tresca(p.mesh, k, f, zeros(p.mesh->tagged_nodes(BoundaryTag::Gamma3).size()));
  const ScalarField direct = linear_solve(*p.mesh, p.mu, p.mu_star, p.f0, p.f2);
  EXPECT_LE((u - direct).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Tresca, OneDimensionalSlipBranch) {
  // -u'' = 3, u(0) = 0, |u'(1)| <= 1: slip with u'(1) = -1, u = -1.5 x^2 + 2 x.
  auto mesh = share(interval(64));
  const SparseMatrix k = assemble_stiffness(*mesh, CoefficientField::constant(1.0), 1.0);
  const Vector f = assemble_body_load(*mesh, CoefficientField::constant(3.0));
  const std::vector<double> t{1.0};
  const ScalarField u = solve_tresca(mesh, k, f, t);
  for (std::size_t i = 0; i < mesh->node_count(); ++i) {
    const double x = mesh->node(i)[0];
    EXPECT_NEAR(u[i], -1.5 * x * x + 2.0 * x, 1e-10) << x;
  }
}

TEST(Tresca, OneDimensionalStickBranch) {
  auto mesh = share(interval(64));
  const SparseMatrix k = assemble_stiffness(*mesh, CoefficientField::constant(1.0), 1.0);
  const Vector f = assemble_body_load(*mesh, CoefficientField::constant(1.0));
  const std::vector<double> t{1.0};
  const ScalarField u = solve_tresca(mesh, k, f, t);
  for (std::size_t i = 0; i < mesh->node_count(); ++i) {
    const double x = mesh->node(i)[0];
    EXPECT_NEAR(u[i], -0.5 * x * x + 0.5 * x, 1e-10) << x;
  }
  EXPECT_EQ(u[64], 0.0);
}

TEST(Tresca, EnergyIsNonincreasingAcrossSweeps) {
  const ProblemData p = plate_problem(FrictionBound::constant(0.4));
  const SparseMatrix k = assemble_stiffness(*p.mesh, p.mu, p.mu_star);
  const Vector f = assemble_load(*p.mesh, p.f0, p.f2);
  const TrescaSolver solver(p.mesh, k);
  const auto t = contact_thresholds(*p.mesh, p.g, ScalarField::Zero(static_cast<Eigen::Index>(p.mesh->node_count())));
  const TrescaResult r = solver.solve(f, t, 1e-12, 50000);
  ASSERT_GE(r.energies.size(), 2u);
  for (std::size_t s = 1; s < r.energies.size(); ++s)
    EXPECT_LE(r.energies[s], r.energies[s - 1] + 1e-14 * std::abs(r.energies[s - 1]));
  // The minimizer beats random competitors.
  Rng rng(3);
  const double best = solver.energy(r.u, f, t);
  for (int trial = 0; trial < 50; ++trial) {
    const ScalarField v = r.u + random_field(*p.mesh, rng, 1e-3);
    EXPECT_GE(solver.energy(v, f, t), best - 1e-14);
  }
}

TEST(Tresca, SweepCapRaises) {
  const ProblemData p = plate_problem(FrictionBound::constant(0.4));
  const SparseMatrix k = assemble_stiffness(*p.mesh, p.mu, p.mu_star);
  const Vector f = assemble_load(*p.mesh, p.f0, p.f2);
  const TrescaSolver solver(p.mesh, k);
  const auto t = contact_thresholds(*p.mesh, p.g, ScalarField::Zero(static_cast<Eigen::Index>(p.mesh->node_count())));
  try {
    solver.solve(f, t, 1e-12, 1);
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_GT(e.last_residual(), 0.0);
  }
}

TEST(Tresca, RejectsSingularStiffness) {
  auto mesh = share(interval(4));
  SparseMatrix singular(5, 5);
  EXPECT_THROW(TrescaSolver(mesh, singular), SolverError);
}

TEST(SolveQvi, SlipIndependentFrictionConvergesInTwoIterations) {
  const QviResult r = solve_qvi(plate_problem(FrictionBound::constant(0.4)));
  EXPECT_EQ(r.report.outer_iterations, 2);
  EXPECT_LT(r.report.increments.back(), 1e-10);
}

TEST(SolveQvi, NegativeSlipBranchOfTheOneDimensionalExample) {
  // mu = 2, f0 = -3, g = 0.5: u = 0.75 x^2 - x, u(1) = -0.25, u'(1) = +g.
  const ProblemData p = example_1d_problem(2.0, -3.0, 0.5, 64);
  const QviResult r = solve_qvi(p);
  for (std::size_t i = 0; i < p.mesh->node_count(); ++i) {
    const double x = p.mesh->node(i)[0];
    EXPECT_NEAR(r.u[i], 0.75 * x * x - x, 1e-10);
  }
  EXPECT_NEAR(r.u[64], -0.25, 1e-10);
  const SparseMatrix k = assemble_stiffness(*p.mesh, p.mu, p.mu_star);
  const auto lambda = contact_multipliers(*p.mesh, k, assemble_load(*p.mesh, p.f0, p.f2), r.u);
  // mu u'(1) = 2 * 0.5
  EXPECT_NEAR(lambda[0], 1.0, 1e-9);
}

TEST(SolveQvi, ZeroDataGivesZero) {
  ProblemData p = plate_problem(FrictionBound::affine(0.0, 0.3));
  p.f0 = CoefficientField::constant(0.0);
  p.f2 = CoefficientField::constant(0.0);
  const QviResult r = solve_qvi(p);
  EXPECT_EQ(r.u.cwiseAbs().maxCoeff(), 0.0);
}

TEST(SolveQvi, ObservedRatiosStayBelowContractionBound) {
  ProblemData p = example_1d_problem(1.0, 5.0, 1.0, 64);
  p.g = FrictionBound::affine(0.2, 0.5);
  const QviResult r = solve_qvi(p);
  EXPECT_TRUE(r.report.contractive);
  EXPECT_NEAR(r.report.contraction_bound, 0.535, 0.01);
  ASSERT_FALSE(r.report.ratios.empty());
  for (double ratio : r.report.ratios) EXPECT_LE(ratio, r.report.contraction_bound + 0.05);
  EXPECT_TRUE(r.report.ratio_bound_respected);
}

TEST(SolveQvi, NoncontractiveDataNeedsOverride) {
  // Sticking data, so the iteration still settles once allowed to run.
  ProblemData p = example_1d_problem(1.0, 1.0, 1.0, 64);
  p.g = FrictionBound::affine(1.0, 1.2);
  EXPECT_THROW(solve_qvi(p), InvalidInput);
  SolverConfig config;
  config.allow_noncontractive = true;
  const QviResult r = solve_qvi(p, config);
  EXPECT_FALSE(r.report.contractive);
  EXPECT_FALSE(r.report.warnings.empty());
}

TEST(SolveQvi, OuterCapRaises) {
  ProblemData p = example_1d_problem(1.0, 5.0, 1.0, 16);
  p.g = FrictionBound::affine(0.2, 0.9);
  SolverConfig config;
  config.max_outer = 3;
  EXPECT_THROW(solve_qvi(p, config), SolverError);
}

TEST(SolveQvi, APrioriBoundThroughDualNorm) {
  const ProblemData p = plate_problem(FrictionBound::affine(0.2, 0.3));
  const QviResult r = solve_qvi(p);
  const Mesh& mesh = *p.mesh;
  const NormOperator norms(mesh);
  const Vector f = restrict_to_free(mesh, assemble_load(mesh, p.f0, p.f2));
  Eigen::SimplicialLDLT<SparseMatrix> gram(restrict_matrix(mesh, norms.gram()));
  const double dual = std::sqrt(f.dot(gram.solve(f)));
  const double c0 = poincare_constant(mesh).constant;
  EXPECT_LE((p.mu_star / (c0 * c0)) * norms.norm(r.u), dual * (1 + 1e-10));
}

TEST(SolveQvi, ComplementarityAtContactNodes) {
  const ProblemData p = plate_problem(FrictionBound::affine(0.2, 0.3));
  const QviResult r = solve_qvi(p);
  const Mesh& mesh = *p.mesh;
  const SparseMatrix k = assemble_stiffness(mesh, p.mu, p.mu_star);
  const auto lambda = contact_multipliers(mesh, k, assemble_load(mesh, p.f0, p.f2), r.u);
  const auto& nodes = mesh.tagged_nodes(BoundaryTag::Gamma3);
  int slipping = 0;
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    const double u = r.u[nodes[q]];
    const double bound = p.g(mesh.node(nodes[q]), std::abs(u));
    EXPECT_LE(std::abs(lambda[q]), bound + 1e-8);
    EXPECT_LE(lambda[q] * u + bound * std::abs(u), 1e-8);
    slipping += u != 0.0;
  }
  EXPECT_GT(slipping, 0);
}

TEST(Membership, SolutionSatisfiesItsOwnInequality) {
  const ProblemData p = plate_problem(FrictionBound::affine(0.2, 0.3));
  const QviResult r = solve_qvi(p);
  EXPECT_LE(r.report.final_violation, 1e-8);
  const auto directions = standard_directions(*p.mesh, r.u, 9);
  const TykhonovIndex exact{0.0, p.f0, p.f2, p.g};
  EXPECT_LE(membership_violation(p, r.u, exact, directions), 1e-8);
  const TykhonovIndex relaxed{0.1, p.f0, p.f2, p.g};
  EXPECT_LE(membership_violation(p, r.u, relaxed, directions), 1e-8);
}

TEST(Membership, PerturbedFieldViolates) {
  const ProblemData p = plate_problem(FrictionBound::affine(0.2, 0.3));
  ScalarField u = solve_qvi(p).u;
  const int node = p.mesh->free_nodes()[p.mesh->free_nodes().size() / 2];
  u[node] += 0.3;
  const TykhonovIndex exact{0.0, p.f0, p.f2, p.g};
  EXPECT_GT(membership_violation(p, u, exact, standard_directions(*p.mesh, u, 9)), 1e-4);
}

TEST(Membership, ExplicitDirectionListWithoutBasis) {
  const ProblemData p = example_1d_problem(1.0, 1.0, 1.0, 32);
  const ScalarField u = solve_qvi(p).u;
  const ScalarField bad = u + 0.1 * u;
  DirectionSet set;
  set.basis = false;
  set.fields = {u};
  const TykhonovIndex exact{0.0, p.f0, p.f2, p.g};
  // Testing bad against the true solution exposes it.
  EXPECT_GT(membership_violation(p, bad, exact, set), 0.0);
  EXPECT_LE(membership_violation(p, u, exact, set), 1e-12);
}

}  // namespace
}  // namespace antiplane
