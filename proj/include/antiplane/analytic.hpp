#pragma once

#include <memory>

#include "antiplane/fem.hpp"
#include "antiplane/qvi_solver.hpp"

namespace antiplane {

/// Boundary state at x = 1 of the 1D frictional problem
///   -mu u'' = f0 on (0, 1), u(0) = 0, |u'(1)| <= g, u'(1) = -g sign u(1) if u(1) != 0.
enum class Regime { SlipNegativeFlux, Stick, SlipPositiveFlux };

const char* to_string(Regime regime);

/// Stick when |f0| <= 2 mu g (ties included), otherwise the sign of f0 picks the slip branch.
Regime regime_of(double mu, double f0, double g);

/// Closed-form solution of the 1D problem above.
double analytic_1d(double mu, double f0, double g, double x);
/// Its derivative in x.
double analytic_1d_derivative(double mu, double f0, double g, double x);

/// The same 1D problem on a uniform mesh of [0, 1] with Gamma1 = {0} and Gamma3 = {1}.
/// The boundary condition bounds u'(1) rather than mu u'(1), so the friction
/// bound handed to the variational problem is mu g.
ProblemData example_1d_problem(double mu, double f0, double g, int elements);

/// Direct solve of K u = F with Gamma1 eliminated; the frictionless reference.
ScalarField linear_solve(const Mesh& mesh, const CoefficientField& mu, double mu_star, const CoefficientField& f0,
                         const CoefficientField& f2);

}  // namespace antiplane
