#include "antiplane/tykhonov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace antiplane {

const char* to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::EpsDecay: return "eps_decay";
    case ScheduleKind::LoadPerturb: return "load_perturb";
    case ScheduleKind::TractionPerturb: return "traction_perturb";
    case ScheduleKind::FrictionPerturb: return "friction_perturb";
    case ScheduleKind::LamePerturb: return "lame_perturb";
    case ScheduleKind::AdversarialLoad: return "adversarial_load";
  }
  return "?";
}

const char* to_string(DecayLaw law) {
  switch (law) {
    case DecayLaw::Harmonic: return "harmonic";
    case DecayLaw::Geometric: return "geometric";
    case DecayLaw::Zero: return "zero";
    case DecayLaw::Alternating: return "alternating";
  }
  return "?";
}

const char* to_string(Verdict verdict) {
  return verdict == Verdict::Convergent ? "CONVERGENT" : "NON-CONVERGENT";
}

double decay_value(DecayLaw law, int n) {
  if (n < 1) throw InvalidInput("sequence index starts at 1");
  switch (law) {
    case DecayLaw::Harmonic: return 1.0 / n;
    case DecayLaw::Geometric: return std::ldexp(1.0, -n);
    case DecayLaw::Zero: return 0.0;
    case DecayLaw::Alternating: return n % 2 == 0 ? 1.0 : -1.0;
  }
  return 0.0;
}

IndexedData schedule_data(const ProblemData& problem, const Schedule& schedule, int n) {
  const double s = decay_value(schedule.decay, n);
  const double delta = schedule.amplitude * s;
  IndexedData data;
  data.theta = {0.0, problem.f0, problem.f2, problem.g};
  data.mu = problem.mu;
  data.mu_star = problem.mu_star;
  data.scale = std::abs(delta);
  switch (schedule.kind) {
    case ScheduleKind::EpsDecay:
      data.theta.eps = std::abs(delta);
      break;
    case ScheduleKind::LoadPerturb:
      data.theta.f0 = problem.f0.plus(schedule.shape, delta);
      break;
    case ScheduleKind::TractionPerturb:
      data.theta.f2 = problem.f2.plus(schedule.shape, delta);
      break;
    case ScheduleKind::FrictionPerturb:
      data.theta.g = problem.g.perturbed(delta, schedule.friction_a, schedule.friction_b);
      data.alpha = std::abs(delta * schedule.friction_a);
      data.beta = std::abs(delta * schedule.friction_b);
      break;
    case ScheduleKind::LamePerturb: {
      const double factor = 1.0 + delta;
      if (!(factor > 0.0)) {
        std::ostringstream msg;
        msg << "Lame schedule makes mu nonpositive at n = " << n;
        throw InvalidInput(msg.str());
      }
      data.mu = problem.mu.scaled(factor);
      data.mu_star = problem.mu_star * factor;
      data.theta.eps = sup_norm_on_cells(*problem.mesh, data.mu.plus(problem.mu, -1.0));
      break;
    }
    case ScheduleKind::AdversarialLoad:
      data.theta.f0 = schedule.target_f0.plus(problem.f0.plus(schedule.target_f0, -1.0), s);
      data.scale = std::abs(s);
      break;
  }
  return data;
}

std::vector<SequenceEntry> generate_sequence(const ProblemData& problem, const Schedule& schedule,
                                             const SolverConfig& config) {
  if (schedule.length < 1) throw InvalidInput("schedule length must be at least 1");
  const Mesh& mesh = *problem.mesh;
  const ConstantsReport constants = compute_constants(mesh);
  const QviSolver reference(problem.mesh, problem.mu, problem.mu_star, constants);
  SolverConfig inner = config;
  inner.check_membership = false;

  std::vector<SequenceEntry> out;
  out.reserve(static_cast<std::size_t>(schedule.length));
  for (int n = 1; n <= schedule.length; ++n) {
    SequenceEntry entry;
    entry.n = n;
    entry.data = schedule_data(problem, schedule, n);
    const Vector load = assemble_load(mesh, entry.data.theta.f0, entry.data.theta.f2);
    try {
      if (schedule.kind == ScheduleKind::LamePerturb) {
        const QviSolver perturbed(problem.mesh, entry.data.mu, entry.data.mu_star, constants);
        entry.u = perturbed.solve(load, entry.data.theta.g, inner).u;
      } else {
        entry.u = reference.solve(load, entry.data.theta.g, inner).u;
      }
    } catch (const InvalidInput& e) {
      std::ostringstream msg;
      msg << "perturbed problem at n = " << n << ": " << e.what();
      throw InvalidInput(msg.str());
    }
    // For Lame sequences theta_n keeps the original data and a(.,.) is the
    // unperturbed form; eps_n = ||mu_n - mu||_inf absorbs the difference.
    entry.violation = membership_violation(mesh, reference.stiffness(), reference.norms(), entry.u,
                                           entry.data.theta.eps, load, entry.data.theta.g,
                                           standard_directions(mesh, entry.u, config.seed + static_cast<std::uint64_t>(n)));
    out.push_back(std::move(entry));
  }
  return out;
}

std::optional<double> tail_loglog_slope(const std::vector<int>& n, const std::vector<double>& errors) {
  if (n.empty() || n.size() != errors.size()) return std::nullopt;
  const int big_n = n.back();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t k = 0; k < n.size(); ++k) {
    if (2 * n[k] < big_n) continue;
    if (!(errors[k] > 0.0)) return std::nullopt;
    const double x = std::log(static_cast<double>(n[k]));
    const double y = std::log(errors[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) return std::nullopt;
  const double denom = count * sxx - sx * sx;
  if (denom == 0.0) return std::nullopt;
  return (count * sxy - sx * sy) / denom;
}

Verdict classify(const std::vector<double>& errors, double pass_threshold) {
  if (errors.empty()) return Verdict::NonConvergent;
  const std::size_t last = errors.size() - 1;
  if (errors[last] <= pass_threshold) return Verdict::Convergent;
  const std::size_t half = errors.size() / 2 > 0 ? errors.size() / 2 - 1 : 0;
  for (std::size_t k = half; k < last; ++k)
    if (errors[k + 1] > 1.1 * errors[k]) return Verdict::NonConvergent;
  return errors[last] <= 0.75 * errors[half] ? Verdict::Convergent : Verdict::NonConvergent;
}

namespace {

ConvergenceReport summarize(const ProblemData& problem, const Schedule& schedule, const SolverConfig& config,
                            const std::vector<SequenceEntry>& sequence, const QviSolver& solver,
                            const ScalarField& reference) {
  ConvergenceReport report;
  report.kind = schedule.kind;
  report.reference = reference;
  report.pass_threshold = std::max(1e-6, 10.0 * config.outer_tolerance);

  std::optional<ScalarField> target;
  if (schedule.kind == ScheduleKind::AdversarialLoad) {
    SolverConfig inner = config;
    inner.check_membership = false;
    const Vector load = assemble_load(*problem.mesh, schedule.target_f0, problem.f2);
    target = solver.solve(load, problem.g, inner).u;
    report.limit_gap = solver.norms().norm(*target - reference);
  }

  std::vector<int> ns;
  std::vector<double> errors;
  for (const SequenceEntry& s : sequence) {
    ConvergenceEntry e;
    e.n = s.n;
    e.eps = s.data.theta.eps;
    e.scale = s.data.scale;
    e.error = solver.norms().norm(s.u - reference);
    e.violation = s.violation;
    if (target) e.target_error = solver.norms().norm(s.u - *target);
    report.max_violation = std::max(report.max_violation, e.violation);
    ns.push_back(e.n);
    errors.push_back(e.error);
    report.entries.push_back(e);
  }
  report.slope = tail_loglog_slope(ns, errors);

  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const ConvergenceEntry& e : report.entries) {
    if (2 * e.n < ns.back() || !(e.scale > 0.0)) continue;
    const double c = e.error / e.scale;
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  if (hi > 0.0) report.rate_constant_spread = (hi - lo) / hi;

  report.verdict = classify(errors, report.pass_threshold);
  return report;
}

}  // namespace

ConvergenceReport lame_perturb_sequence(const ProblemData& problem, const Schedule& schedule,
                                        const SolverConfig& config) {
  if (schedule.kind != ScheduleKind::LamePerturb) throw InvalidInput("lame_perturb_sequence needs a Lame schedule");
  return run_convergence(problem, schedule, config);
}

ConvergenceReport run_convergence(const ProblemData& problem, const Schedule& schedule, const SolverConfig& config) {
  const Mesh& mesh = *problem.mesh;
  const QviSolver solver(problem.mesh, problem.mu, problem.mu_star, compute_constants(mesh));
  SolverConfig inner = config;
  inner.check_membership = false;
  const ScalarField reference = solver.solve(assemble_load(mesh, problem.f0, problem.f2), problem.g, inner).u;
  const auto sequence = generate_sequence(problem, schedule, config);
  return summarize(problem, schedule, config, sequence, solver, reference);
}

FrictionEnvelope verify_c4(const FrictionBound& g_n, const FrictionBound& g, const std::vector<Point>& points,
                           const std::vector<double>& slips) {
  if (points.empty() || slips.empty()) throw InvalidInput("verify_c4 needs sample points and slips");
  // Largest deviation for each |r|; the envelope only sees the upper hull.
  std::map<double, double> peak;
  std::vector<std::pair<double, double>> samples;
  for (const Point& x : points) {
    for (double r : slips) {
      const double a = std::abs(r);
      const double d = std::abs(g_n(x, r) - g(x, r));
      samples.emplace_back(a, d);
      auto [it, inserted] = peak.emplace(a, d);
      if (!inserted) it->second = std::max(it->second, d);
    }
  }
  const double count = static_cast<double>(samples.size());
  double abs_sum = 0.0;
  for (const auto& s : samples) abs_sum += s.first;

  std::vector<std::pair<double, double>> hull;
  for (const auto& p : peak) {
    while (hull.size() >= 2) {
      const auto& o = hull[hull.size() - 2];
      const auto& a = hull.back();
      const double cross = (a.first - o.first) * (p.second - o.second) - (a.second - o.second) * (p.first - o.first);
      if (cross >= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(p);
  }

  auto feasible_cost = [&](double alpha, double beta) -> std::optional<double> {
    if (alpha < 0.0 || beta < 0.0) return std::nullopt;
    return count * alpha + beta * abs_sum;
  };
  double max_d = 0.0;
  for (const auto& p : peak) max_d = std::max(max_d, p.second);
  FrictionEnvelope best{max_d, 0.0, 0.0};
  double best_cost = *feasible_cost(max_d, 0.0);
  for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
    const auto& p = hull[k];
    const auto& q = hull[k + 1];
    const double beta = (q.second - p.second) / (q.first - p.first);
    const double alpha = p.second - beta * p.first;
    if (auto cost = feasible_cost(alpha, beta); cost && *cost < best_cost) {
      best_cost = *cost;
      best = {alpha, beta, 0.0};
    }
  }
  if (peak.begin()->first > 0.0) {
    double beta = 0.0;
    for (const auto& p : peak) beta = std::max(beta, p.second / p.first);
    if (auto cost = feasible_cost(0.0, beta); cost && *cost < best_cost) {
      best_cost = *cost;
      best = {0.0, beta, 0.0};
    }
  }
  best.max_residual = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) best.max_residual = std::max(best.max_residual, s.second - best.alpha - best.beta * s.first);
  return best;
}

}  // namespace antiplane
