#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "antiplane/mesh.hpp"
#include "antiplane/types.hpp"

namespace antiplane {

/// Real-valued data on the domain or its boundary (mu, f0, f2, targets).
class CoefficientField {
 public:
  using Function = std::function<double(const Point&)>;

  CoefficientField();
  explicit CoefficientField(Function fn);

  static CoefficientField constant(double value);
  /// c[0] + c[1] x + c[2] x^2 + c[3] x^3 in the first coordinate.
  static CoefficientField polynomial(std::vector<double> coefficients);

  double operator()(const Point& x) const { return fn_(x); }
  /// True only for fields known to vanish identically.
  bool is_zero() const { return zero_; }

  /// Pointwise this + scale * other.
  CoefficientField plus(const CoefficientField& other, double scale) const;
  /// Pointwise scale * this.
  CoefficientField scaled(double scale) const;

 private:
  Function fn_;
  bool zero_ = false;
};

/// Friction bound g(x, r) >= 0 with declared Lipschitz constant in r.
class FrictionBound {
 public:
  using Rule = std::function<double(const Point&, double)>;

  FrictionBound();
  FrictionBound(Rule rule, double lipschitz);

  static FrictionBound constant(double g0);
  /// max(0, g0 + slope |r|), Lipschitz constant |slope|.
  static FrictionBound affine(double g0, double slope);

  double operator()(const Point& x, double r) const { return rule_(x, r); }
  double lipschitz() const { return lipschitz_; }

  /// g + delta (a + b |r|), clamped at zero; Lipschitz constant L_g + |delta b|.
  FrictionBound perturbed(double delta, double a, double b) const;
  /// Pointwise scale * g, Lipschitz constant |scale| L_g.
  FrictionBound scaled(double scale) const;

 private:
  Rule rule_;
  double lipschitz_ = 0.0;
};

/// Spot-checks nonnegativity and the declared Lipschitz constant on seeded
/// random samples over Gamma3 (or the whole boundary when Gamma3 is empty).
/// Throws InvalidInput on the first violation.
void check_friction_bound(const Mesh& mesh, const FrictionBound& g, std::uint64_t seed,
                          int samples = 200);

/// Matrix of a(v, w) = int mu grad v . grad w over all nodes (Gamma1 rows kept).
/// mu is sampled at cell midpoints; values below mu_star are rejected.
SparseMatrix assemble_stiffness(const Mesh& mesh, const CoefficientField& mu, double mu_star);
/// Gradient stiffness with mu = 1.
SparseMatrix assemble_gradient_stiffness(const Mesh& mesh);
/// Consistent P1 mass matrix over the domain.
SparseMatrix assemble_mass(const Mesh& mesh);

/// Rows and columns of the free nodes, in free_nodes() order.
SparseMatrix restrict_matrix(const Mesh& mesh, const SparseMatrix& full);

/// F with F^T v = int f0 v dx, f0 sampled at cell midpoints.
Vector assemble_body_load(const Mesh& mesh, const CoefficientField& f0);
/// F with F^T v = int_{Gamma2} f2 v da for f2 constant on each Gamma2 facet
/// (ordered as mesh.facets(Gamma2)).
Vector assemble_traction_load(const Mesh& mesh, std::span<const double> facet_values);
/// Body plus traction load, f2 sampled at Gamma2 facet midpoints. A nonzero f2
/// with empty Gamma2 is dropped and reported through `warnings`.
Vector assemble_load(const Mesh& mesh, const CoefficientField& f0, const CoefficientField& f2,
                     std::vector<std::string>* warnings = nullptr);

/// Samples f2 at the midpoints of the Gamma2 facets.
std::vector<double> sample_traction(const Mesh& mesh, const CoefficientField& f2);
/// Interpolates a field at the nodes; Gamma1 nodes are set to zero.
ScalarField interpolate(const Mesh& mesh, const CoefficientField& field);

/// Lumped-quadrature value of int_{Gamma3} g(|eta|) |v| da.
double eval_j(const Mesh& mesh, const FrictionBound& g, const ScalarField& eta, const ScalarField& v);

/// Maximum of mu sampled at cell midpoints (the discrete L-infinity norm).
double sup_norm_on_cells(const Mesh& mesh, const CoefficientField& field);
/// Minimum of mu sampled at cell midpoints.
double inf_on_cells(const Mesh& mesh, const CoefficientField& field);

/// H1 inner product on P1 fields, backed by M + S.
class NormOperator {
 public:
  explicit NormOperator(const Mesh& mesh);

  double inner(const ScalarField& v, const ScalarField& w) const;
  double norm(const ScalarField& v) const;
  /// L2(D) norm through the consistent mass matrix.
  double l2_norm(const ScalarField& v) const;
  /// ||grad v||_{L2}.
  double gradient_norm(const ScalarField& v) const;

  const SparseMatrix& mass() const { return mass_; }
  const SparseMatrix& gradient_stiffness() const { return stiffness_; }
  const SparseMatrix& gram() const { return gram_; }

 private:
  SparseMatrix mass_;
  SparseMatrix stiffness_;
  SparseMatrix gram_;
};

/// ||v||_V = sqrt(int v^2 + |grad v|^2).
double v_norm(const Mesh& mesh, const ScalarField& v);

}  // namespace antiplane
