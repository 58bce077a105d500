#pragma once

#include <cstdint>

#include "antiplane/fem.hpp"
#include "antiplane/mesh.hpp"

namespace antiplane {

struct PowerIterationOptions {
  double tolerance = 1e-10;  ///< relative change of the eigenvalue estimate
  int max_iterations = 10000;
  std::uint64_t seed = 20240607;
};

/// Square root of the dominant generalized eigenvalue and its eigenfield
/// (full nodal array, zero on Gamma1).
struct EigenEstimate {
  double constant = 0.0;
  ScalarField field;
  int iterations = 0;
  double residual = 0.0;
};

/// Smallest c0 with ||v||_V <= c0 ||grad v|| on the discrete space:
/// sqrt of the largest eigenvalue of (M + S) v = lambda S v on the free nodes.
EigenEstimate poincare_constant(const Mesh& mesh, const PowerIterationOptions& options = {});

/// Smallest c3 with ||v||_{L2(Gamma3)} <= c3 ||v||_V, where the Gamma3 norm uses
/// the same lumped quadrature as the friction functional. Zero when Gamma3 is empty.
EigenEstimate trace_constant(const Mesh& mesh, const PowerIterationOptions& options = {});

struct ConstantsReport {
  double c0 = 0.0;
  double c3 = 0.0;
  ScalarField c0_field;
  ScalarField c3_field;
};

ConstantsReport compute_constants(const Mesh& mesh, const PowerIterationOptions& options = {});

struct SmallnessMargin {
  double k = 0.0;   ///< L_g c0^2 c3^2 / mu_star, the contraction factor of the fixed-point map
  bool ok = false;  ///< k < 1
};

SmallnessMargin smallness_margin(double lipschitz, double c0, double c3, double mu_star);

/// ||v||_{L2(Gamma3)} with lumped quadrature.
double contact_l2_norm(const Mesh& mesh, const ScalarField& v);

}  // namespace antiplane
