#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/SparseCholesky>

#include "antiplane/constants.hpp"
#include "antiplane/fem.hpp"
#include "antiplane/mesh.hpp"

namespace antiplane {

/// Data of one instance of the antiplane frictional problem.
struct ProblemData {
  std::shared_ptr<const Mesh> mesh;
  CoefficientField mu = CoefficientField::constant(1.0);
  double mu_star = 1.0;
  CoefficientField f0;
  CoefficientField f2;
  FrictionBound g;
};

struct SolverConfig {
  double outer_tolerance = 1e-10;  ///< ||eta_{m+1} - eta_m||_V
  double inner_tolerance = 1e-12;  ///< max nodal update of one sweep
  int max_outer = 200;
  int max_inner = 50000;
  /// Run even when L_g c0^2 c3^2 >= mu_star.
  bool allow_noncontractive = false;
  double ratio_slack = 0.05;
  /// Compute the membership violation of the final iterate.
  bool check_membership = true;
  std::uint64_t seed = 1;
};

struct TrescaResult {
  ScalarField u;
  int sweeps = 0;
  double last_update = 0.0;
  /// Reduced energy after each sweep.
  std::vector<double> energies;
};

/// Minimizes 1/2 v^T K v - F^T v + sum_i t_i |v_i| over fields vanishing on Gamma1,
/// where i runs over the Gamma3 nodes and t_i = w_i G_i >= 0.
///
/// The smooth block is eliminated exactly with a sparse Cholesky factorization,
/// leaving a dense problem on the Gamma3 nodes. That problem is solved by cyclic
/// coordinate minimization with the exact soft-threshold step, so the energy is
/// nonincreasing sweep by sweep.
class TrescaSolver {
 public:
  TrescaSolver(std::shared_ptr<const Mesh> mesh, const SparseMatrix& stiffness);

  /// `thresholds` follows mesh.tagged_nodes(Gamma3). A warm start only seeds
  /// the Gamma3 values.
  TrescaResult solve(const Vector& load, std::span<const double> thresholds, double tolerance,
                     int max_sweeps, const ScalarField* warm_start = nullptr) const;

  /// Full energy of a nodal field.
  double energy(const ScalarField& v, const Vector& load, std::span<const double> thresholds) const;

  const SparseMatrix& stiffness() const { return stiffness_; }
  const Mesh& mesh() const { return *mesh_; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  SparseMatrix stiffness_;
  std::vector<int> smooth_;   // node ids
  std::vector<int> contact_;  // node ids, Gamma3 order
  Eigen::SimplicialLDLT<SparseMatrix> smooth_factor_;
  Matrix coupling_;  // K_ss^{-1} K_sc
  Matrix schur_;     // K_cc - K_cs K_ss^{-1} K_sc
};

/// Convenience wrapper: one Tresca solve with default tolerances.
ScalarField solve_tresca(std::shared_ptr<const Mesh> mesh, const SparseMatrix& stiffness, const Vector& load,
                         std::span<const double> thresholds);

struct SolveReport {
  int outer_iterations = 0;
  std::vector<double> increments;
  /// increments[m] / increments[m-1], from the second iteration on.
  std::vector<double> ratios;
  std::vector<int> inner_sweeps;
  double contraction_bound = 0.0;  ///< k
  bool contractive = true;         ///< k < 1
  bool ratio_bound_respected = true;
  double final_violation = 0.0;
  std::vector<std::string> warnings;
};

struct QviResult {
  ScalarField u;
  SolveReport report;
};

/// Fixed-point solver for the quasivariational inequality on one stiffness.
/// Iterates eta_{m+1} = Tresca(G_i = g(x_i, |eta_m(x_i)|)) from eta_0 = 0.
class QviSolver {
 public:
  QviSolver(std::shared_ptr<const Mesh> mesh, const CoefficientField& mu, double mu_star,
            ConstantsReport constants);

  QviResult solve(const Vector& load, const FrictionBound& g, const SolverConfig& config = {}) const;

  const Mesh& mesh() const { return tresca_.mesh(); }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  const SparseMatrix& stiffness() const { return tresca_.stiffness(); }
  const NormOperator& norms() const { return norms_; }
  const ConstantsReport& constants() const { return constants_; }
  double mu_star() const { return mu_star_; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  double mu_star_;
  ConstantsReport constants_;
  NormOperator norms_;
  TrescaSolver tresca_;
};

/// Assembles, computes the mesh constants and solves.
QviResult solve_qvi(const ProblemData& problem, const SolverConfig& config = {});

/// Per-node thresholds w_i g(x_i, |eta_i|) on Gamma3.
std::vector<double> contact_thresholds(const Mesh& mesh, const FrictionBound& g, const ScalarField& eta);

/// Traction mu d_nu u at the Gamma3 nodes, recovered as (K u - F)_i / w_i.
std::vector<double> contact_multipliers(const Mesh& mesh, const SparseMatrix& stiffness, const Vector& load,
                                        const ScalarField& u);

// -- Membership in the approximating set Omega(theta) ------------------------

/// Perturbed data theta = (eps, f0~, f2~, g~).
struct TykhonovIndex {
  double eps = 0.0;
  CoefficientField f0;
  CoefficientField f2;
  FrictionBound g;
};

/// Test directions for the inequality defining Omega(theta). Basis directions
/// are evaluated in closed form: v = u +- s e_i and v = +- s e_i for every free node.
struct DirectionSet {
  double basis_scale = 1.0;
  bool basis = true;
  std::vector<ScalarField> fields;
};

/// 100 seeded random fields (zero on Gamma1), v = 0 and v = 2u, plus basis directions.
DirectionSet standard_directions(const Mesh& mesh, const ScalarField& u, std::uint64_t seed,
                                 int random_count = 100);

/// max_v [ (F~, v-u) - a(u, v-u) - j~(u, v) + j~(u, u) - eps ||u|| ||v-u|| ]_+
double membership_violation(const Mesh& mesh, const SparseMatrix& stiffness, const NormOperator& norms,
                            const ScalarField& u, double eps, const Vector& load, const FrictionBound& g,
                            const DirectionSet& directions);

/// Same, with a(.,.) assembled from the problem's mu and F~ from theta.
double membership_violation(const ProblemData& problem, const ScalarField& u, const TykhonovIndex& theta,
                            const DirectionSet& directions);

}  // namespace antiplane
