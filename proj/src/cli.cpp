#include "antiplane/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>

#include "CLI11.hpp"
#include "antiplane/analytic.hpp"
#include "antiplane/constants.hpp"
#include "antiplane/report_io.hpp"

namespace antiplane {

namespace fs = std::filesystem;

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"constants", "solve", "validate-1d", "tykhonov", "control", "oc-sequence"};
  return names;
}

namespace {

std::string real(double v) { return format_real(v); }
std::string real(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }
std::string flag(bool v) { return v ? "true" : "false"; }
std::string verdict_name(Verdict v) { return v == Verdict::Convergent ? "convergent" : "non-convergent"; }

void require(const ExperimentConfig& config, std::initializer_list<const char*> sections, const std::string& sub) {
  for (const char* s : sections)
    if (!config.has(s)) throw ConfigError("subcommand '" + sub + "' needs a '" + s + ":' section", 0);
}

void require_seed(const ExperimentConfig& config, const std::string& sub) {
  if (!config.seed) throw ConfigError("subcommand '" + sub + "' draws random numbers and needs run.seed or --seed", 0);
}

class Output {
 public:
  explicit Output(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }
  void write(const std::string& name, const std::string& content) const { write_atomic(dir_ / name, content); }

 private:
  fs::path dir_;
};

SolverConfig solver_config(const ExperimentConfig& config) {
  SolverConfig s = config.solver;
  if (config.seed) s.seed = *config.seed;
  return s;
}

std::vector<std::string> point_columns(const Mesh& mesh) {
  return mesh.dimension() == 1 ? std::vector<std::string>{"x"} : std::vector<std::string>{"x", "y"};
}

void append_point(std::vector<std::string>& row, const Mesh& mesh, const Point& p) {
  row.push_back(real(p[0]));
  if (mesh.dimension() == 2) row.push_back(real(p[1]));
}

int exit_for(Verdict verdict, const std::optional<Verdict>& expected) {
  const Verdict wanted = expected.value_or(Verdict::Convergent);
  return verdict == wanted ? kExitSuccess : kExitVerdictFailure;
}

int run_constants(const ExperimentConfig& config, const Output& output, std::ostream& out) {
  require(config, {"mesh"}, "constants");
  const Mesh mesh = build_mesh(config.mesh);
  const ConstantsReport c = compute_constants(mesh);
  double lipschitz = 0.0, mu_star = 1.0;
  if (config.has("problem")) {
    const ProblemData p = build_problem(config);
    lipschitz = p.g.lipschitz();
    mu_star = p.mu_star;
  }
  const auto margin = smallness_margin(lipschitz, c.c0, c.c3, mu_star);
  CsvTable table({"c0", "c3", "k", "ok"});
  table.row({real(c.c0), real(c.c3), real(margin.k), flag(margin.ok)});
  output.write("constants.csv", table.str());
  out << table.str();
  return kExitSuccess;
}

int run_solve(const ExperimentConfig& config, const Output& output, std::ostream& out, std::ostream& err) {
  require(config, {"mesh", "problem"}, "solve");
  require_seed(config, "solve");
  const ProblemData p = build_problem(config);
  const Mesh& mesh = *p.mesh;
  const QviResult r = solve_qvi(p, solver_config(config));
  for (const auto& w : r.report.warnings) err << "warning: " << w << '\n';

  auto header = point_columns(mesh);
  header.insert(header.begin(), "node");
  header.push_back("u");
  CsvTable solution(header);
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    std::vector<std::string> row{std::to_string(i)};
    append_point(row, mesh, mesh.node(i));
    row.push_back(real(r.u[static_cast<Eigen::Index>(i)]));
    solution.row(row);
  }
  output.write("solution.csv", solution.str());

  CsvTable iterations({"iteration", "increment", "ratio", "inner_sweeps"});
  for (std::size_t m = 0; m < r.report.increments.size(); ++m)
    iterations.row({std::to_string(m + 1), real(r.report.increments[m]), m > 0 ? real(r.report.ratios[m - 1]) : "",
                    std::to_string(r.report.inner_sweeps[m])});
  output.write("solve_report.csv", iterations.str());

  const SparseMatrix k = assemble_stiffness(mesh, p.mu, p.mu_star);
  const auto lambda = contact_multipliers(mesh, k, assemble_load(mesh, p.f0, p.f2), r.u);
  auto contact_header = point_columns(mesh);
  contact_header.insert(contact_header.begin(), "node");
  for (const char* c : {"u", "multiplier", "bound"}) contact_header.push_back(c);
  CsvTable contact(contact_header);
  const auto& nodes = mesh.tagged_nodes(BoundaryTag::Gamma3);
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    const double u = r.u[nodes[q]];
    std::vector<std::string> row{std::to_string(nodes[q])};
    append_point(row, mesh, mesh.node(nodes[q]));
    row.push_back(real(u));
    row.push_back(real(lambda[q]));
    row.push_back(real(p.g(mesh.node(nodes[q]), std::abs(u))));
    contact.row(row);
  }
  output.write("contact.csv", contact.str());

  CsvTable summary({"outer_iterations", "contraction_bound", "contractive", "ratio_bound_respected", "final_violation"});
  summary.row({std::to_string(r.report.outer_iterations), real(r.report.contraction_bound),
               flag(r.report.contractive), flag(r.report.ratio_bound_respected), real(r.report.final_violation)});
  output.write("solve_summary.csv", summary.str());
  out << summary.str();
  return kExitSuccess;
}

int run_validate(const ExperimentConfig& config, const Output& output, std::ostream& out) {
  require(config, {"validate"}, "validate-1d");
  auto cases = config.validate.cases;
  if (cases.empty()) cases = {{1.0, 1.0, 1.0}, {1.0, 3.0, 1.0}, {2.0, -3.0, 0.5}, {1.0, 2.0, 1.0}};
  CsvTable table({"mu", "f0", "g", "regime", "elements", "max_error", "pass"});
  bool all = true;
  for (const auto& [mu, f0, g] : cases) {
    const ProblemData p = example_1d_problem(mu, f0, g, config.validate.elements);
    const ScalarField u = solve_qvi(p, solver_config(config)).u;
    double err = 0.0;
    for (std::size_t i = 0; i < p.mesh->node_count(); ++i)
      err = std::max(err, std::abs(u[static_cast<Eigen::Index>(i)] - analytic_1d(mu, f0, g, p.mesh->node(i)[0])));
    const bool pass = err <= config.validate.tolerance;
    all = all && pass;
    table.row({real(mu), real(f0), real(g), to_string(regime_of(mu, f0, g)), std::to_string(config.validate.elements),
               real(err), flag(pass)});
  }
  output.write("validate_1d.csv", table.str());
  out << table.str();
  return all ? kExitSuccess : kExitVerdictFailure;
}

int run_tykhonov(const ExperimentConfig& config, const Output& output, std::ostream& out) {
  require(config, {"mesh", "problem", "schedule"}, "tykhonov");
  require_seed(config, "tykhonov");
  const ProblemData p = build_problem(config);
  const ScheduleSection& s = config.schedule;
  Schedule schedule;
  schedule.kind = s.kind;
  schedule.decay = s.decay;
  schedule.amplitude = s.amplitude;
  schedule.shape = CoefficientField::polynomial(s.shape);
  schedule.friction_a = s.friction_a;
  schedule.friction_b = s.friction_b;
  schedule.target_f0 = CoefficientField::polynomial(s.target_f0);
  schedule.length = s.length;
  const ConvergenceReport r = run_convergence(p, schedule, solver_config(config));

  CsvTable table({"n", "eps", "scale", "error", "violation", "target_error"});
  PlotSeries errors{"||u_n - u||", {}, {}}, targets{"||u_n - u_bar||", {}, {}};
  for (const auto& e : r.entries) {
    table.row({std::to_string(e.n), real(e.eps), real(e.scale), real(e.error), real(e.violation), real(e.target_error)});
    errors.x.push_back(e.n);
    errors.y.push_back(e.error);
    if (e.target_error) targets.x.push_back(e.n), targets.y.push_back(*e.target_error);
  }
  output.write("tykhonov.csv", table.str());
  std::vector<PlotSeries> series{errors};
  if (!targets.x.empty()) series.push_back(targets);
  output.write("tykhonov.svg", loglog_svg(std::string("Tykhonov sequence: ") + to_string(s.kind), "n",
                                          "error in V-norm", series));

  const bool certified = r.max_violation <= 1e-8;
  CsvTable summary({"kind", "decay", "length", "slope", "rate_constant_spread", "limit_gap", "max_violation",
                    "verdict", "expected"});
  summary.row({to_string(s.kind), to_string(s.decay), std::to_string(s.length), real(r.slope),
               real(r.rate_constant_spread), real(r.limit_gap), real(r.max_violation), verdict_name(r.verdict),
               s.expect ? verdict_name(*s.expect) : ""});
  output.write("tykhonov_summary.csv", summary.str());
  out << summary.str();
  if (!certified) return kExitVerdictFailure;
  return exit_for(r.verdict, s.expect);
}

ControlProblem build_control(const ExperimentConfig& config, const ProblemData& p) {
  CostWeights w;
  w.a0 = config.cost.a0;
  w.a2 = config.cost.a2;
  w.phi = interpolate(*p.mesh, CoefficientField::polynomial(config.cost.phi));
  return ControlProblem(p, ControlSpec{config.control.patches, config.control.box}, w, solver_config(config));
}

MinimizeOptions minimize_options(const ExperimentConfig& config) {
  MinimizeOptions o;
  o.starts = config.control.starts;
  o.start_radius = config.control.start_radius;
  o.seed = *config.seed;
  return o;
}

int write_oc_sequence(const ExperimentConfig& config, const ControlProblem& problem, const Output& output,
                      std::ostream& out) {
  const OCScheduleSection& s = config.oc_schedule;
  OCSchedule schedule;
  schedule.kind = s.kind;
  schedule.decay = s.decay;
  schedule.amplitude = s.amplitude;
  schedule.psi = interpolate(*problem.base().mesh, CoefficientField::polynomial(s.psi));
  schedule.shape = CoefficientField::polynomial(s.shape);
  schedule.friction_a = s.friction_a;
  schedule.friction_b = s.friction_b;
  schedule.length = s.length;
  const OCConvergenceReport r = run_oc_sequence(problem, schedule, minimize_options(config));

  CsvTable table({"n", "scale", "value", "cost_error", "control_error", "state_error", "violation"});
  PlotSeries cost{"|J_n* - J*|", {}, {}}, control{"||f2_n* - f2*||", {}, {}};
  double worst = 0.0;
  for (const auto& e : r.entries) {
    table.row({std::to_string(e.n), real(e.scale), real(e.value), real(e.cost_error), real(e.control_error),
               real(e.state_error), real(e.violation)});
    cost.x.push_back(e.n), cost.y.push_back(e.cost_error);
    control.x.push_back(e.n), control.y.push_back(e.control_error);
    worst = std::max(worst, e.violation);
  }
  output.write("oc_sequence.csv", table.str());
  output.write("oc_sequence.svg",
               loglog_svg(std::string("Optimal control sequence: ") + to_string(s.kind), "n", "error", {cost, control}));
  CsvTable summary({"kind", "length", "cost_slope", "control_slope", "J", "max_violation", "verdict", "expected"});
  summary.row({to_string(s.kind), std::to_string(s.length), real(r.cost_slope), real(r.control_slope),
               real(r.reference.value), real(worst), verdict_name(r.verdict), s.expect ? verdict_name(*s.expect) : ""});
  output.write("oc_summary.csv", summary.str());
  out << summary.str();
  if (worst > 1e-8) return kExitVerdictFailure;
  return exit_for(r.verdict, s.expect);
}

int run_control(const ExperimentConfig& config, const Output& output, std::ostream& out) {
  require(config, {"mesh", "problem", "control", "cost"}, "control");
  require_seed(config, "control");
  const ProblemData p = build_problem(config);
  const ControlProblem problem = build_control(config, p);
  const OptimalControl oc = minimize_J(problem, minimize_options(config));

  CsvTable trace({"start", "iteration", "J"});
  for (const auto& t : oc.report.trace) trace.row({std::to_string(t.start), std::to_string(t.iteration), real(t.value)});
  output.write("control_trace.csv", trace.str());
  CsvTable optimum({"patch", "value"});
  for (int i = 0; i < oc.pair.control.size(); ++i) optimum.row({std::to_string(i), real(oc.pair.control[i])});
  output.write("control_optimum.csv", optimum.str());
  const auto converged = std::count_if(oc.report.starts.begin(), oc.report.starts.end(),
                                       [](const StartOutcome& s) { return s.converged; });
  CsvTable summary({"J", "min_evaluated", "violation", "solution_set_size", "converged_starts"});
  summary.row({real(oc.value), real(oc.report.min_evaluated), real(oc.report.violation),
               std::to_string(oc.report.solution_set.size()), std::to_string(converged)});
  output.write("control_summary.csv", summary.str());
  out << summary.str();
  if (oc.report.violation > 1e-8) return kExitVerdictFailure;
  return config.has("oc_schedule") ? write_oc_sequence(config, problem, output, out) : kExitSuccess;
}

int run_oc(const ExperimentConfig& config, const Output& output, std::ostream& out) {
  require(config, {"mesh", "problem", "control", "cost", "oc_schedule"}, "oc-sequence");
  require_seed(config, "oc-sequence");
  const ProblemData p = build_problem(config);
  return write_oc_sequence(config, build_control(config, p), output, out);
}

}  // namespace

ProblemData build_problem(const ExperimentConfig& config) {
  ProblemData p;
  p.mesh = std::make_shared<const Mesh>(build_mesh(config.mesh));
  const ProblemSection& s = config.problem;
  p.mu = CoefficientField::polynomial(s.mu);
  p.mu_star = s.mu_star ? *s.mu_star : inf_on_cells(*p.mesh, p.mu);
  p.f0 = CoefficientField::polynomial(s.f0);
  p.f2 = CoefficientField::polynomial(s.f2);
  p.g = s.g_slope == 0.0 ? FrictionBound::constant(s.g0) : FrictionBound::affine(s.g0, s.g_slope);
  return p;
}

int run(const std::string& subcommand, const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  const auto& names = subcommands();
  if (std::find(names.begin(), names.end(), subcommand) == names.end()) {
    err << "error: unknown subcommand '" << subcommand << "'\n";
    return kExitUsage;
  }
  try {
    const Output output(config.out);
    if (subcommand == "constants") return run_constants(config, output, out);
    if (subcommand == "solve") return run_solve(config, output, out, err);
    if (subcommand == "validate-1d") return run_validate(config, output, out);
    if (subcommand == "tykhonov") return run_tykhonov(config, output, out);
    if (subcommand == "control") return run_control(config, output, out);
    return run_oc(config, output, out);
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitVerdictFailure;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Antiplane frictional contact experiments", "antiplane"};
  std::string subcommand, config_path, out_dir;
  std::uint64_t seed = 0;
  app.add_option("subcommand", subcommand, "constants | solve | validate-1d | tykhonov | control | oc-sequence")
      ->required();
  app.add_option("--config", config_path, "experiment config file")->required();
  auto* out_option = app.add_option("--out", out_dir, "output directory (overrides run.out)");
  auto* seed_option = app.add_option("--seed", seed, "RNG seed (overrides run.seed)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }
  const auto& names = subcommands();
  if (std::find(names.begin(), names.end(), subcommand) == names.end()) {
    err << "error: unknown subcommand '" << subcommand << "'\n";
    return kExitUsage;
  }
  ExperimentConfig config;
  try {
    config = parse_config(config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (*out_option) config.out = out_dir;
  if (*seed_option) {
    config.seed = seed;
    config.solver.seed = seed;
  }
  return run(subcommand, config, out, err);
}

}  // namespace antiplane
