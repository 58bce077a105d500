// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "antiplane/analytic.hpp"
#include "antiplane/cli.hpp"
#include "antiplane/constants.hpp"
#include "antiplane/optimal_control.hpp"
#include "antiplane/tykhonov.hpp"

namespace {

using namespace antiplane;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buffer[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buffer, sizeof buffer, format, args);
  va_end(args);
  return buffer;
}

Mesh interval(int elements, BoundaryTag right) {
  MeshSpec spec;
  spec.dimension = 1;
  spec.resolution = {elements, 1};
  spec.partition = {{Side::Left, BoundaryTag::Gamma1}, {Side::Right, right}};
  return build_mesh(spec);
}

ProblemData plate() {
  MeshSpec spec;
  spec.dimension = 2;
  spec.extents = {2.0, 1.0};
  spec.resolution = {16, 8};
  spec.partition = {{Side::Left, BoundaryTag::Gamma1},
                    {Side::Right, BoundaryTag::Gamma2},
                    {Side::Bottom, BoundaryTag::Gamma3},
                    {Side::Top, BoundaryTag::Gamma2}};
  ProblemData p;
  p.mesh = std::make_shared<const Mesh>(build_mesh(spec));
  p.mu = CoefficientField::polynomial({1.0, 0.25});
  p.mu_star = 1.0;
  p.f0 = CoefficientField::constant(2.0);
  p.f2 = CoefficientField::constant(0.5);
  p.g = FrictionBound::affine(0.2, 0.3);
  return p;
}

/// Worst complementarity defects over every solve checked so far.
struct Complementarity {
  double bound_excess = -INFINITY;
  double sign_defect = -INFINITY;
  int solves = 0;

  void check(const ProblemData& p, const ScalarField& u) { check(p, assemble_load(*p.mesh, p.f0, p.f2), u); }

  void check(const ProblemData& p, const Vector& load, const ScalarField& u) {
    const Mesh& mesh = *p.mesh;
    const SparseMatrix k = assemble_stiffness(mesh, p.mu, p.mu_star);
    const auto lambda = contact_multipliers(mesh, k, load, u);
    const auto& nodes = mesh.tagged_nodes(BoundaryTag::Gamma3);
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const double ui = u[nodes[q]];
      const double g = p.g(mesh.node(nodes[q]), std::abs(ui));
      bound_excess = std::max(bound_excess, std::abs(lambda[q]) - g);
      sign_defect = std::max(sign_defect, lambda[q] * ui + g * std::abs(ui));
    }
    ++solves;
  }
};

Complementarity complementarity;

Outcome analytic_agreement() {
  const auto start = Clock::now();
  double worst = 0.0;
  for (auto [mu, f0, g] : {std::tuple{1.0, 1.0, 1.0}, {1.0, 3.0, 1.0}, {2.0, -3.0, 0.5}, {1.0, 2.0, 1.0}}) {
    const ProblemData p = example_1d_problem(mu, f0, g, 256);
    const ScalarField u = solve_qvi(p).u;
    complementarity.check(p, u);
    for (std::size_t i = 0; i < p.mesh->node_count(); ++i)
      worst = std::max(worst, std::abs(u[static_cast<Eigen::Index>(i)] - analytic_1d(mu, f0, g, p.mesh->node(i)[0])));
  }
  const double t = seconds_since(start);
  return {worst <= 1e-3 && t < 1.0, fmt("max nodal error %.3g, %.3f s", worst, t)};
}

Outcome discrete_constants() {
  const auto start = Clock::now();
  const ConstantsReport c = compute_constants(interval(512, BoundaryTag::Gamma3));
  const double c0 = std::sqrt(1.0 + 4.0 / (M_PI * M_PI)), c3 = std::sqrt(std::tanh(1.0));
  const double e0 = std::abs(c.c0 - c0) / c0, e3 = std::abs(c.c3 - c3) / c3;
  const double t = seconds_since(start);
  return {e0 <= 0.01 && e3 <= 0.01 && t < 5.0,
          fmt("c0 = %.6f (%.3f%%), c3 = %.6f (%.3f%%), %.3f s", c.c0, 100 * e0, c.c3, 100 * e3, t)};
}

Outcome contraction() {
  ProblemData p = example_1d_problem(1.0, 5.0, 1.0, 64);
  SolverConfig slow;
  slow.max_outer = 5000;  // k close to 1 needs many steps to reach 1e-10
  p.g = FrictionBound::affine(0.2, 0.9);
  const QviResult a = solve_qvi(p, slow);
  complementarity.check(p, a.u);
  double worst_ratio = 0.0;
  for (double r : a.report.ratios) worst_ratio = std::max(worst_ratio, r);
  const bool ratios_ok = worst_ratio <= a.report.contraction_bound + 0.05;

  p.g = FrictionBound::affine(0.2, 0.5);
  const QviResult b = solve_qvi(p);
  complementarity.check(p, b.u);
  const double k = b.report.contraction_bound;
  const int allowed = static_cast<int>(std::ceil(std::log(1e-10) / std::log(k))) + 5;
  const bool fast = b.report.outer_iterations <= allowed && b.report.increments.back() < 1e-10;
  return {ratios_ok && fast, fmt("k = %.4f: max ratio %.4f; k = %.4f: %d iterations (allowed %d)",
                                 a.report.contraction_bound, worst_ratio, k, b.report.outer_iterations, allowed)};
}

bool slope_in(const std::optional<double>& slope, double lo, double hi) { return slope && *slope >= lo && *slope <= hi; }

Outcome load_schedule() {
  const ProblemData p = plate();
  Schedule s;
  s.kind = ScheduleKind::LoadPerturb;
  s.length = 64;
  const ConvergenceReport r = run_convergence(p, s);
  complementarity.check(p, r.reference);
  return {slope_in(r.slope, -1.15, -0.85) && r.max_violation <= 1e-8,
          fmt("slope %.4f, max violation %.3g", r.slope.value_or(NAN), r.max_violation)};
}

Outcome lame_schedule() {
  Schedule s;
  s.kind = ScheduleKind::LamePerturb;
  s.length = 64;
  const ConvergenceReport r = lame_perturb_sequence(plate(), s);
  return {slope_in(r.slope, -1.15, -0.85) && r.max_violation <= 1e-8,
          fmt("slope %.4f, max violation %.3g", r.slope.value_or(NAN), r.max_violation)};
}

Outcome adversarial() {
  const ProblemData p = example_1d_problem(1.0, 1.0, 1.0, 128);
  Schedule s;
  s.kind = ScheduleKind::AdversarialLoad;
  s.decay = DecayLaw::Geometric;
  s.target_f0 = CoefficientField::constant(1.5);
  s.length = 32;
  const ConvergenceReport r = run_convergence(p, s);
  const double gap = r.limit_gap.value_or(0.0);
  double tail_min = INFINITY;
  for (const auto& e : r.entries)
    if (2 * e.n >= s.length) tail_min = std::min(tail_min, e.error);
  const double last = r.entries.back().target_error.value_or(INFINITY);
  return {gap >= 0.05 && tail_min >= 0.9 * gap && last <= 1e-6 && r.verdict == Verdict::NonConvergent,
          fmt("gap %.4f, tail min e_n %.4f, ||u_N - u_bar|| %.3g", gap, tail_min, last)};
}

ScalarField nodal(const Mesh& mesh, const std::function<double(double)>& fn) {
  ScalarField v(static_cast<Eigen::Index>(mesh.node_count()));
  for (std::size_t i = 0; i < mesh.node_count(); ++i) v[static_cast<Eigen::Index>(i)] = fn(mesh.node(i)[0]);
  return v;
}

ProblemData linear_bar() {
  ProblemData p;
  p.mesh = std::make_shared<const Mesh>(interval(64, BoundaryTag::Gamma2));
  p.mu = CoefficientField::constant(1.0);
  p.f0 = CoefficientField::constant(0.0);
  p.f2 = CoefficientField::constant(0.0);
  p.g = FrictionBound::constant(0.0);
  return p;
}

Outcome control_closed_form() {
  const auto start = Clock::now();
  const ProblemData bar = linear_bar();
  double control_err = 0.0, value_err = 0.0;
  for (double a2 : {1.0 / 3.0, 1.0, 3.0}) {
    CostWeights w;
    w.a2 = a2;
    w.phi = nodal(*bar.mesh, [](double x) { return x; });
    const OptimalControl oc = minimize_J(ControlProblem(bar, ControlSpec{}, w));
    control_err = std::max(control_err, std::abs(oc.pair.control[0] - 1.0 / (1.0 + 3.0 * a2)));
    value_err = std::max(value_err, std::abs(oc.value - a2 / (1.0 + 3.0 * a2)));
  }

  ProblemData p = plate();
  CostWeights w;
  w.a2 = 0.5;
  w.phi = interpolate(*p.mesh, CoefficientField::polynomial({0.0, 0.2}));
  const ControlProblem problem(p, ControlSpec{2, std::nullopt}, w);
  const OptimalControl oc = minimize_J(problem);
  complementarity.check(p, problem.load(oc.pair.control), oc.pair.u);
  double grid_min = INFINITY;
  Vector grid_arg(2);
  for (int i = 0; i <= 40; ++i)
    for (int j = 0; j <= 40; ++j) {
      Vector c(2);
      c << -2.0 + 0.1 * i, -2.0 + 0.1 * j;
      const double v = eval_J(c, problem);
      if (v < grid_min) grid_min = v, grid_arg = c;
    }
  const double cell = (oc.pair.control - grid_arg).cwiseAbs().maxCoeff();
  const double t = seconds_since(start);
  return {control_err <= 1e-3 && value_err <= 1e-6 && cell <= 0.1 && oc.value <= grid_min + 1e-12 && t < 30.0,
          fmt("closed form: |f2 err| %.3g, |J err| %.3g; grid: distance %.3f, J %.6g vs %.6g; %.2f s", control_err,
              value_err, cell, oc.value, grid_min, t)};
}

Outcome oc_sequence() {
  const ProblemData bar = linear_bar();
  CostWeights w;
  w.a2 = 1.0 / 3.0;
  w.phi = nodal(*bar.mesh, [](double x) { return x * x; });
  const ControlProblem problem(bar, ControlSpec{}, w);
  OCSchedule s;
  s.kind = OCScheduleKind::TargetPerturb;
  s.psi = nodal(*bar.mesh, [](double x) { return x * x - 0.75 * x; });
  s.length = 32;
  const OCConvergenceReport r = run_oc_sequence(problem, s);
  const double last = r.entries.back().control_error;
  return {slope_in(r.cost_slope, -1.2, -0.8) && last < 1e-3,
          fmt("cost slope %.4f, ||f2_N - f2*|| %.3g", r.cost_slope.value_or(NAN), last)};
}

Outcome complementarity_check() {
  const ProblemData p = plate();
  complementarity.check(p, solve_qvi(p).u);
  const auto& c = complementarity;
  return {c.bound_excess <= 1e-8 && c.sign_defect <= 1e-8,
          fmt("%d solves: max |lambda| - G = %.3g, max lambda u + G|u| = %.3g", c.solves, c.bound_excess,
              c.sign_defect)};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kSuite[][2] = {
    {"constants", "mesh:\n  dimension = 1\n  resolution = 128\n"},
    {"solve",
     "mesh:\n  dimension = 2\n  resolution = 12 6\nproblem:\n  mu = 1 0.25\n  f0 = 2\n  f2 = 0.5\n  g0 = 0.2\n"
     "  g_slope = 0.3\nrun:\n  seed = 7\n"},
    {"validate-1d", "validate:\n  elements = 256\n"},
    {"tykhonov",
     "mesh:\n  dimension = 2\n  resolution = 8 4\nproblem:\n  mu = 1 0.5\n  f0 = 2\n  g0 = 0.2\n  g_slope = 0.3\n"
     "schedule:\n  kind = lame_perturb\n  length = 16\nrun:\n  seed = 12\n"},
    {"control",
     "mesh:\n  dimension = 2\n  resolution = 6 4\nproblem:\n  f0 = 1\n  g0 = 0.1\n  g_slope = 0.3\ncontrol:\n"
     "  patches = 2\ncost:\n  a2 = 0.5\n  phi = 0 0.2\nrun:\n  seed = 21\n"},
    {"oc-sequence",
     "mesh:\n  dimension = 1\n  resolution = 32\n  right = gamma2\nproblem:\n  f0 = 0\ncontrol:\n  patches = 1\n"
     "cost:\n  a2 = 0.5\n  phi = 0 0 1\noc_schedule:\n  psi = 0 -0.75 1\n  length = 8\nrun:\n  seed = 31\n"},
};

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "antiplane_acceptance";
  fs::remove_all(root);
  int compared = 0, differing = 0, failed_runs = 0;
  for (const auto& [sub, text] : kSuite) {
    std::vector<fs::path> dirs;
    for (int run_id = 0; run_id < 2; ++run_id) {
      const fs::path dir = root / (std::string(sub) + "_" + std::to_string(run_id));
      fs::create_directories(dir);
      ExperimentConfig config = parse_config_text(text);
      config.out = dir;
      std::ostringstream out, err;
      if (run(sub, config, out, err) != kExitSuccess) ++failed_runs;
      dirs.push_back(dir);
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      if (entry.path().extension() != ".csv") continue;
      ++compared;
      if (slurp(entry.path()) != slurp(dirs[1] / entry.path().filename())) ++differing;
    }
  }
  fs::remove_all(root);
  return {compared > 0 && differing == 0 && failed_runs == 0,
          fmt("%d CSV files compared, %d differ, %d failed runs", compared, differing, failed_runs)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1D analytic agreement", analytic_agreement},
      {"discrete constants", discrete_constants},
      {"contraction of the fixed point", contraction},
      {"load perturbation schedule", load_schedule},
      {"Lame perturbation schedule", lame_schedule},
      {"adversarial dichotomy", adversarial},
      {"optimal control closed form", control_closed_form},
      {"optimal control target schedule", oc_sequence},
      {"contact complementarity", complementarity_check},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
