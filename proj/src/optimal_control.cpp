#include "antiplane/optimal_control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "antiplane/rng.hpp"

namespace antiplane {

std::vector<int> patch_assignment(const Mesh& mesh, const ControlSpec& spec) {
  const auto& facets = mesh.facets(BoundaryTag::Gamma2);
  if (facets.empty()) throw InvalidInput("control needs a nonempty Gamma2");
  if (spec.patches < 1 || static_cast<std::size_t>(spec.patches) > facets.size())
    throw InvalidInput("control patches must be between 1 and the number of Gamma2 facets");
  std::vector<int> patch(facets.size());
  for (std::size_t k = 0; k < facets.size(); ++k)
    patch[k] = static_cast<int>(k * static_cast<std::size_t>(spec.patches) / facets.size());
  return patch;
}

ControlProblem::ControlProblem(const ProblemData& base, ControlSpec spec, CostWeights weights, SolverConfig config)
    : ControlProblem(base, spec, std::move(weights), config,
                     std::make_shared<const QviSolver>(base.mesh, base.mu, base.mu_star,
                                                       compute_constants(*base.mesh))) {}

ControlProblem::ControlProblem(const ProblemData& base, ControlSpec spec, CostWeights weights, SolverConfig config,
                               std::shared_ptr<const QviSolver> solver)
    : base_(base), spec_(spec), weights_(std::move(weights)), config_(config), solver_(std::move(solver)) {
  const Mesh& mesh = *base_.mesh;
  if (!(weights_.a0 >= 0.0) || !(weights_.a2 >= 0.0)) throw InvalidInput("cost weights must be nonnegative");
  if (weights_.phi.size() == 0) weights_.phi = ScalarField::Zero(static_cast<Eigen::Index>(mesh.node_count()));
  if (static_cast<std::size_t>(weights_.phi.size()) != mesh.node_count())
    throw InvalidInput("target phi must have one value per node");
  for (int node : mesh.tagged_nodes(BoundaryTag::Gamma1))
    if (weights_.phi[node] != 0.0) throw InvalidInput("target phi must vanish on Gamma1");
  if (spec_.box && !(spec_.box->first < spec_.box->second)) throw InvalidInput("control box is empty");

  config_.check_membership = false;
  base_.f2 = CoefficientField::constant(0.0);
  patch_of_facet_ = patch_assignment(mesh, spec_);
  patch_measure_.assign(static_cast<std::size_t>(spec_.patches), 0.0);
  const auto& facets = mesh.facets(BoundaryTag::Gamma2);
  for (std::size_t k = 0; k < facets.size(); ++k) patch_measure_[patch_of_facet_[k]] += facets[k].measure;
  body_load_ = assemble_body_load(mesh, base_.f0);
  for (int p = 0; p < spec_.patches; ++p) {
    std::vector<double> unit(facets.size(), 0.0);
    for (std::size_t k = 0; k < facets.size(); ++k) unit[k] = patch_of_facet_[k] == p ? 1.0 : 0.0;
    patch_loads_.push_back(assemble_traction_load(mesh, unit));
  }
}

std::vector<double> ControlProblem::facet_values(const Vector& control) const {
  std::vector<double> values(patch_of_facet_.size());
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = control[patch_of_facet_[k]];
  return values;
}

Vector ControlProblem::load(const Vector& control) const {
  if (control.size() != spec_.patches) throw InvalidInput("control has the wrong dimension");
  Vector f = body_load_;
  for (int p = 0; p < spec_.patches; ++p) f += control[p] * patch_loads_[p];
  return f;
}

double ControlProblem::control_norm(const Vector& control) const {
  double total = 0.0;
  for (int p = 0; p < spec_.patches; ++p) total += patch_measure_[p] * control[p] * control[p];
  return std::sqrt(total);
}

double ControlProblem::cost(const ScalarField& u, const Vector& control) const {
  const double tracking = solver_->norms().l2_norm(u - weights_.phi);
  const double effort = control_norm(control);
  return weights_.a0 * tracking * tracking + weights_.a2 * effort * effort;
}

ControlProblem::Evaluation ControlProblem::evaluate(const Vector& control) const {
  Evaluation e;
  e.u = solver_->solve(load(control), base_.g, config_).u;
  e.value = cost(e.u, control);
  return e;
}

double ControlProblem::admissibility_violation(const AdmissiblePair& pair) const {
  return membership_violation(solver_->mesh(), solver_->stiffness(), solver_->norms(), pair.u, 0.0,
                              load(pair.control), base_.g, standard_directions(solver_->mesh(), pair.u, config_.seed));
}

ControlProblem ControlProblem::with_index(const OCIndex& theta) const {
  if (theta.eps != 0.0)
    throw InvalidInput("only eps = 0 indices are constructible for the control problem");
  ProblemData data = base_;
  data.f0 = theta.f0;
  data.g = theta.g;
  CostWeights weights = weights_;
  weights.phi = theta.phi;
  return ControlProblem(data, spec_, std::move(weights), config_, solver_);
}

double cost(const ControlProblem& problem, const ScalarField& u, const Vector& control) {
  return problem.cost(u, control);
}

double eval_J(const Vector& control, const ControlProblem& problem) { return problem.evaluate(control).value; }

OptimalControl minimize_J(const ControlProblem& problem, const MinimizeOptions& options) {
  if (options.starts < 1) throw InvalidInput("at least one start is required");
  if (!(problem.weights().a2 > 0.0)) throw InvalidInput("minimizing J needs a2 > 0");
  const int d = problem.dimension();
  double lo = -options.start_radius, hi = options.start_radius;
  NelderMeadOptions simplex = options.simplex;
  if (problem.spec().box) {
    lo = problem.spec().box->first;
    hi = problem.spec().box->second;
    simplex.box = problem.spec().box;
  }

  OptimalControl out;
  OCReport& report = out.report;
  report.min_evaluated = std::numeric_limits<double>::infinity();
  Vector best_seen;
  double best_seen_value = std::numeric_limits<double>::infinity();
  auto objective = [&](const Vector& c) {
    const double value = eval_J(c, problem);
    if (value < report.min_evaluated) report.min_evaluated = value;
    if (value < best_seen_value) best_seen_value = value, best_seen = c;
    return value;
  };

  Rng rng(options.seed);
  for (int s = 0; s < options.starts; ++s) {
    Vector start = Vector::Zero(d);
    if (s > 0)
      for (int i = 0; i < d; ++i) start[i] = rng.uniform(lo, hi);
    if (problem.spec().box) start = start.cwiseMax(lo).cwiseMin(hi);
    const NelderMeadResult nm = nelder_mead(objective, start, simplex);
    for (std::size_t it = 0; it < nm.history.size(); ++it)
      report.trace.push_back({s, static_cast<int>(it) + 1, nm.history[it]});
    report.starts.push_back({s, nm.x, nm.value, nm.iterations, nm.converged});
  }

  const StartOutcome* best = nullptr;
  for (const StartOutcome& s : report.starts) {
    if (!s.converged) continue;
    if (!best) {
      best = &s;
      continue;
    }
    const double tie = 1e-12 * (1.0 + std::abs(best->value));
    if (s.value < best->value - tie ||
        (std::abs(s.value - best->value) <= tie && problem.control_norm(s.control) < problem.control_norm(best->control)))
      best = &s;
  }
  if (!best) {
    std::ostringstream msg;
    msg << "no simplex start converged; best J seen " << best_seen_value;
    throw OptimizationError(msg.str(), best_seen, best_seen_value);
  }

  for (const StartOutcome& s : report.starts) {
    if (!s.converged || s.value > best->value + options.cluster_radius) continue;
    const bool known = std::any_of(report.solution_set.begin(), report.solution_set.end(), [&](const Vector& c) {
      return problem.control_norm(c - s.control) <= 1e-6;
    });
    if (!known) report.solution_set.push_back(s.control);
  }
  // Keep the selected optimum first.
  auto it = std::find_if(report.solution_set.begin(), report.solution_set.end(),
                         [&](const Vector& c) { return problem.control_norm(c - best->control) <= 1e-6; });
  if (it != report.solution_set.end()) std::iter_swap(report.solution_set.begin(), it);

  auto evaluation = problem.evaluate(best->control);
  out.pair = {std::move(evaluation.u), best->control};
  out.value = evaluation.value;
  report.violation = problem.admissibility_violation(out.pair);
  return out;
}

const char* to_string(OCScheduleKind kind) {
  switch (kind) {
    case OCScheduleKind::TargetPerturb: return "target_perturb";
    case OCScheduleKind::LoadPerturb: return "load_perturb";
    case OCScheduleKind::FrictionPerturb: return "friction_perturb";
  }
  return "?";
}

OCIndex oc_schedule_index(const ControlProblem& problem, const OCSchedule& schedule, int n) {
  const double delta = schedule.amplitude * decay_value(schedule.decay, n);
  OCIndex theta{0.0, problem.base().f0, problem.base().g, problem.weights().phi};
  switch (schedule.kind) {
    case OCScheduleKind::TargetPerturb:
      if (schedule.psi.size() != theta.phi.size()) throw InvalidInput("target perturbation psi has the wrong size");
      theta.phi = theta.phi + delta * schedule.psi;
      break;
    case OCScheduleKind::LoadPerturb:
      theta.f0 = theta.f0.plus(schedule.shape, delta);
      break;
    case OCScheduleKind::FrictionPerturb:
      theta.g = theta.g.perturbed(delta, schedule.friction_a, schedule.friction_b);
      break;
  }
  return theta;
}

OCConvergenceReport run_oc_sequence(const ControlProblem& problem, const OCSchedule& schedule,
                                    const MinimizeOptions& options) {
  if (schedule.length < 1) throw InvalidInput("schedule length must be at least 1");
  OCConvergenceReport report;
  report.kind = schedule.kind;
  report.reference = minimize_J(problem, options);

  std::vector<ScalarField> solution_states;
  for (const Vector& c : report.reference.report.solution_set) solution_states.push_back(problem.evaluate(c).u);

  std::vector<int> ns;
  std::vector<double> cost_errors, control_errors, state_errors;
  for (int n = 1; n <= schedule.length; ++n) {
    const ControlProblem perturbed = problem.with_index(oc_schedule_index(problem, schedule, n));
    const OptimalControl optimum = minimize_J(perturbed, options);
    OCConvergenceEntry e;
    e.n = n;
    e.scale = std::abs(schedule.amplitude * decay_value(schedule.decay, n));
    e.value = optimum.value;
    e.cost_error = std::abs(optimum.value - report.reference.value);
    e.control_error = std::numeric_limits<double>::infinity();
    const auto& set = report.reference.report.solution_set;
    for (std::size_t k = 0; k < set.size(); ++k) {
      const double dist = problem.control_norm(optimum.pair.control - set[k]);
      if (dist < e.control_error) {
        e.control_error = dist;
        e.state_error = problem.solver().norms().norm(optimum.pair.u - solution_states[k]);
      }
    }
    e.violation = optimum.report.violation;
    ns.push_back(n);
    cost_errors.push_back(e.cost_error);
    control_errors.push_back(e.control_error);
    state_errors.push_back(e.state_error);
    report.entries.push_back(e);
  }
  report.cost_slope = tail_loglog_slope(ns, cost_errors);
  report.control_slope = tail_loglog_slope(ns, control_errors);
  const bool convergent = classify(cost_errors, 1e-8) == Verdict::Convergent &&
                          classify(control_errors, 1e-3) == Verdict::Convergent &&
                          classify(state_errors, 1e-3) == Verdict::Convergent;
  report.verdict = convergent ? Verdict::Convergent : Verdict::NonConvergent;
  return report;
}

}  // namespace antiplane
