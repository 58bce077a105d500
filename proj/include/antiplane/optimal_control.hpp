#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "antiplane/nelder_mead.hpp"
#include "antiplane/qvi_solver.hpp"
#include "antiplane/tykhonov.hpp"

namespace antiplane {

/// Weights and target of L(u, f2) = a0 ||u - phi||^2_{L2(D)} + a2 ||f2||^2_{L2(Gamma2)}.
struct CostWeights {
  double a0 = 1.0;
  double a2 = 1.0;
  ScalarField phi;
};

/// Piecewise-constant tractions on contiguous groups of Gamma2 facets.
struct ControlSpec {
  int patches = 1;
  std::optional<std::pair<double, double>> box;
};

/// Patch index of every Gamma2 facet (facets grouped by side, then in mesh order).
std::vector<int> patch_assignment(const Mesh& mesh, const ControlSpec& spec);

struct AdmissiblePair {
  ScalarField u;
  Vector control;
};

/// theta = (eps, f0~, g~, phi~). Only eps = 0 is constructible: minimizers over
/// the enlarged admissible set are not produced by the state solver.
struct OCIndex {
  double eps = 0.0;
  CoefficientField f0;
  FrictionBound g;
  ScalarField phi;
};

/// Optimal control of the tractions on Gamma2. The state is the solution of the
/// frictional problem with the given f0, g and f2 built from the control.
class ControlProblem {
 public:
  /// `base.f2` is ignored; tractions come from the control.
  ControlProblem(const ProblemData& base, ControlSpec spec, CostWeights weights, SolverConfig config = {});

  int dimension() const { return spec_.patches; }
  const ControlSpec& spec() const { return spec_; }
  const CostWeights& weights() const { return weights_; }
  const ProblemData& base() const { return base_; }
  const QviSolver& solver() const { return *solver_; }

  std::vector<double> facet_values(const Vector& control) const;
  Vector load(const Vector& control) const;
  /// ||f2||_{L2(Gamma2)} of a control.
  double control_norm(const Vector& control) const;
  double cost(const ScalarField& u, const Vector& control) const;

  struct Evaluation {
    ScalarField u;
    double value = 0.0;
  };
  /// State u(f2) and J(f2) = L(u(f2), f2).
  Evaluation evaluate(const Vector& control) const;

  /// Membership violation of (u, f2) in the admissible set, theta = (0, f0, f2, g).
  double admissibility_violation(const AdmissiblePair& pair) const;

  /// Same problem with data replaced by theta (eps must be 0).
  ControlProblem with_index(const OCIndex& theta) const;

 private:
  ControlProblem(const ProblemData& base, ControlSpec spec, CostWeights weights, SolverConfig config,
                 std::shared_ptr<const QviSolver> solver);

  ProblemData base_;
  ControlSpec spec_;
  CostWeights weights_;
  SolverConfig config_;
  std::shared_ptr<const QviSolver> solver_;
  std::vector<int> patch_of_facet_;
  std::vector<double> patch_measure_;
  Vector body_load_;
  std::vector<Vector> patch_loads_;
};

/// L(u, f2).
double cost(const ControlProblem& problem, const ScalarField& u, const Vector& control);
/// J(f2).
double eval_J(const Vector& control, const ControlProblem& problem);

struct MinimizeOptions {
  int starts = 4;
  std::uint64_t seed = 1;
  double start_radius = 2.0;
  NelderMeadOptions simplex;
  double cluster_radius = 1e-4;  ///< in J, for the solution-set catalog
};

struct TraceRow {
  int start = 0;
  int iteration = 0;
  double value = 0.0;
};

struct StartOutcome {
  int start = 0;
  Vector control;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct OCReport {
  std::vector<StartOutcome> starts;
  std::vector<TraceRow> trace;
  /// Distinct converged optima within cluster_radius of the best value.
  std::vector<Vector> solution_set;
  double min_evaluated = 0.0;
  double violation = 0.0;
};

struct OptimalControl {
  AdmissiblePair pair;
  double value = 0.0;
  OCReport report;
};

/// Thrown when no start converges; carries the best point seen.
class OptimizationError : public SolverError {
 public:
  OptimizationError(const std::string& what, Vector best, double value)
      : SolverError(what), best_(std::move(best)), value_(value) {}
  const Vector& best() const { return best_; }
  double value() const { return value_; }

 private:
  Vector best_;
  double value_;
};

/// Multistart simplex minimization of J. Start 0 is the zero control, the others
/// are seeded uniform draws in [-start_radius, start_radius]^d (or the box).
/// Ties in J are broken by the smaller control norm.
OptimalControl minimize_J(const ControlProblem& problem, const MinimizeOptions& options = {});

enum class OCScheduleKind { TargetPerturb, LoadPerturb, FrictionPerturb };
const char* to_string(OCScheduleKind kind);

///   TargetPerturb    phi_n = phi + amplitude s_n psi
///   LoadPerturb      f0_n = f0 + amplitude s_n shape
///   FrictionPerturb  g_n = g + amplitude s_n (friction_a + friction_b |r|)
struct OCSchedule {
  OCScheduleKind kind = OCScheduleKind::TargetPerturb;
  DecayLaw decay = DecayLaw::Harmonic;
  double amplitude = 1.0;
  ScalarField psi;
  CoefficientField shape = CoefficientField::constant(1.0);
  double friction_a = 1.0;
  double friction_b = 0.0;
  int length = 32;
};

OCIndex oc_schedule_index(const ControlProblem& problem, const OCSchedule& schedule, int n);

struct OCConvergenceEntry {
  int n = 0;
  double scale = 0.0;
  double control_error = 0.0;  ///< distance of f2_n* to the solution set in L2(Gamma2)
  double state_error = 0.0;    ///< ||u_n* - u*||_V for the nearest solution
  double cost_error = 0.0;     ///< |J_n* - J*|
  double value = 0.0;
  double violation = 0.0;
};

struct OCConvergenceReport {
  OCScheduleKind kind = OCScheduleKind::TargetPerturb;
  std::vector<OCConvergenceEntry> entries;
  std::optional<double> cost_slope;
  std::optional<double> control_slope;
  OptimalControl reference;
  Verdict verdict = Verdict::NonConvergent;
};

/// Solves the unperturbed control problem, then each perturbed one, and
/// measures the optimal pairs against the unperturbed solution set.
OCConvergenceReport run_oc_sequence(const ControlProblem& problem, const OCSchedule& schedule,
                                    const MinimizeOptions& options = {});

}  // namespace antiplane
