#include <algorithm>
#include <filesystem>
#include <iostream>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "antiplane/cli.hpp"

namespace antiplane {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "antiplane_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path path = dir / "experiment.conf";
  std::ofstream(path) << text;
  return path;
}

int invoke(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "antiplane");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

const char* kBar = R"(mesh:
  dimension = 1
  resolution = 64

problem:
  mu = 1
  f0 = 1
  g0 = 1
)";

TEST(ParseConfig, MinimalSolveConfigGetsDefaults) {
  const ExperimentConfig c = parse_config_text(kBar);
  EXPECT_TRUE(c.has("mesh"));
  EXPECT_TRUE(c.has("problem"));
  EXPECT_FALSE(c.has("solver"));
  EXPECT_EQ(c.mesh.resolution[0], 64);
  EXPECT_EQ(c.solver.outer_tolerance, 1e-10);
  EXPECT_EQ(c.solver.inner_tolerance, 1e-12);
  EXPECT_EQ(c.solver.max_outer, 200);
  EXPECT_EQ(c.solver.max_inner, 50000);
  EXPECT_FALSE(c.seed.has_value());
  EXPECT_EQ(c.mesh.partition.at(Side::Left), BoundaryTag::Gamma1);
  EXPECT_EQ(c.mesh.partition.at(Side::Right), BoundaryTag::Gamma3);
}

TEST(ParseConfig, ReadsEveryValueKind) {
  const ExperimentConfig c = parse_config_text(R"(# full example
mesh:
  dimension = 2
  extent = 2, 1
  resolution = 8 4
  top = gamma3   # trailing comment
solver:
  allow_noncontractive = true
  max_outer = 500
schedule:
  kind = lame_perturb
  decay = geometric
  expect = non-convergent
control:
  box = -1 1
validate:
  case = 1 1 1
  case = 2 -3 0.5
run:
  seed = 18446744073709551615
  out = results/a b
)");
  EXPECT_EQ(c.mesh.extents[0], 2.0);
  EXPECT_EQ(c.mesh.resolution[1], 4);
  EXPECT_EQ(c.mesh.partition.at(Side::Top), BoundaryTag::Gamma3);
  EXPECT_EQ(c.mesh.partition.at(Side::Bottom), BoundaryTag::Gamma3);
  EXPECT_TRUE(c.solver.allow_noncontractive);
  EXPECT_EQ(c.solver.max_outer, 500);
  EXPECT_EQ(c.schedule.kind, ScheduleKind::LamePerturb);
  EXPECT_EQ(c.schedule.decay, DecayLaw::Geometric);
  EXPECT_EQ(c.schedule.expect, Verdict::NonConvergent);
  EXPECT_EQ(c.control.box->first, -1.0);
  EXPECT_EQ(c.validate.cases.size(), 2u);
  EXPECT_EQ(*c.seed, 18446744073709551615ull);
  EXPECT_EQ(c.solver.seed, *c.seed);
  EXPECT_EQ(c.out, fs::path("results/a b"));
}

int error_line(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

TEST(ParseConfig, MisspelledKeyNamesTheLine) {
  const std::string text = "solver:\n  outer_tolerance = 1e-9\n  tolerence = 1e-8\n";
  EXPECT_EQ(error_line(text), 3);
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("tolerence"), std::string::npos);
  }
}

TEST(ParseConfig, RejectsMalformedInput) {
  EXPECT_EQ(error_line("solver:\n  max_outer = ten\n"), 2);
  EXPECT_EQ(error_line("solver:\n  max_outer = 1.5\n"), 2);
  EXPECT_EQ(error_line("problem:\n  g0 = 1 2\n"), 2);
  EXPECT_EQ(error_line("problem:\n  mu = 1 2 3 4 5\n"), 2);
  EXPECT_EQ(error_line("mesh:\n  left = gamma4\n"), 2);
  EXPECT_EQ(error_line("meshes:\n"), 1);
  EXPECT_EQ(error_line("dimension = 1\n"), 1);
  EXPECT_EQ(error_line("mesh:\n  dimension\n"), 2);
  EXPECT_EQ(error_line("mesh:\n  dimension =\n"), 2);
  EXPECT_EQ(error_line("mesh:\n  dimension = 1\n  dimension = 2\n"), 3);
  EXPECT_EQ(error_line("mesh:\nmesh:\n"), 2);
  EXPECT_EQ(error_line("run:\n  seed = -4\n"), 2);
  EXPECT_EQ(error_line("solver:\n  allow_noncontractive = maybe\n"), 2);
  EXPECT_EQ(error_line("problem:\n  g0 = inf\n"), 2);
}

TEST(ParseConfig, MissingFile) {
  EXPECT_THROW(parse_config("/nonexistent/antiplane.conf"), ConfigError);
  EXPECT_EQ(invoke({"solve", "--config", "/nonexistent/antiplane.conf"}), kExitUsage);
}

TEST(Run, UnknownSubcommandIsAUsageError) {
  std::string err;
  EXPECT_EQ(run("frobnicate", parse_config_text(kBar), std::cout, std::cerr), kExitUsage);
  EXPECT_EQ(invoke({"frobnicate", "--config", "x.conf"}, nullptr, &err), kExitUsage);
  EXPECT_NE(err.find("frobnicate"), std::string::npos);
}

TEST(Run, MissingArgumentsAreUsageErrors) {
  EXPECT_EQ(invoke({"solve"}), kExitUsage);
  EXPECT_EQ(invoke({}), kExitUsage);
  EXPECT_EQ(invoke({"solve", "--config", "a", "--seed", "abc"}), kExitUsage);
}

TEST(Run, RandomizedSubcommandsNeedASeed) {
  const fs::path dir = scratch("seed");
  ExperimentConfig c = parse_config_text(std::string(kBar) + "schedule:\n  kind = load_perturb\n  length = 4\n");
  c.out = dir;
  std::ostringstream out, err;
  EXPECT_EQ(run("tykhonov", c, out, err), kExitUsage);
  EXPECT_NE(err.str().find("seed"), std::string::npos);
  const fs::path config = write_config(dir, std::string(kBar) + "schedule:\n  kind = load_perturb\n  length = 4\n");
  EXPECT_EQ(invoke({"tykhonov", "--config", config.string(), "--out", dir.string(), "--seed", "5"}), kExitSuccess);
}

TEST(Run, MissingSectionIsAUsageError) {
  ExperimentConfig c = parse_config_text("mesh:\n  dimension = 1\nrun:\n  seed = 1\n");
  c.out = scratch("section");
  std::ostringstream out, err;
  EXPECT_EQ(run("solve", c, out, err), kExitUsage);
  EXPECT_NE(err.str().find("problem"), std::string::npos);
}

TEST(Run, Validate1dSweepPasses) {
  const fs::path dir = scratch("validate");
  const fs::path config = write_config(dir, "validate:\n  elements = 256\n");
  std::string out;
  EXPECT_EQ(invoke({"validate-1d", "--config", config.string(), "--out", dir.string()}, &out), kExitSuccess);
  const std::string csv = slurp(dir / "validate_1d.csv");
  EXPECT_EQ(csv.rfind("mu,f0,g,regime,elements,max_error,pass\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_EQ(csv.find("false"), std::string::npos);
}

TEST(Run, SolverFailureIsAVerdictFailure) {
  // P1 is exact at the nodes here, so force a failure through the outer cap.
  const fs::path dir = scratch("validate_fail");
  const fs::path config = write_config(dir, "validate:\n  case = 1 3 1\nsolver:\n  max_outer = 1\n");
  EXPECT_EQ(invoke({"validate-1d", "--config", config.string(), "--out", dir.string()}), kExitVerdictFailure);
}

const char* kAdversarial = R"(mesh:
  dimension = 1
  resolution = 64
problem:
  mu = 1
  f0 = 1
  g0 = 1
schedule:
  kind = adversarial_load
  decay = geometric
  target_f0 = 1.5
  length = 24
  expect = non-convergent
run:
  seed = 3
)";

TEST(Run, AdversarialScheduleConfirmsExpectedNonConvergence) {
  const fs::path dir = scratch("adversarial");
  const fs::path config = write_config(dir, kAdversarial);
  EXPECT_EQ(invoke({"tykhonov", "--config", config.string(), "--out", dir.string()}), kExitSuccess);
  const std::string summary = slurp(dir / "tykhonov_summary.csv");
  EXPECT_NE(summary.find("non-convergent,non-convergent"), std::string::npos);
  EXPECT_EQ(slurp(dir / "tykhonov.csv").rfind("n,eps,scale,error,violation,target_error\n", 0), 0u);

  // Expecting convergence from the same sequence is a verdict failure.
  std::string text = kAdversarial;
  text.replace(text.find("non-convergent"), 14, "convergent");
  const fs::path wrong = write_config(dir, text);
  EXPECT_EQ(invoke({"tykhonov", "--config", wrong.string(), "--out", dir.string()}), kExitVerdictFailure);
}

bool balanced_svg(const std::string& svg) {
  // Every opening tag is closed or self-closing, in order.
  std::vector<std::string> stack;
  std::size_t pos = 0;
  while ((pos = svg.find('<', pos)) != std::string::npos) {
    const std::size_t end = svg.find('>', pos);
    if (end == std::string::npos) return false;
    const std::string tag = svg.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty() || tag[0] == '?' || tag[0] == '!') continue;
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
    } else if (tag.back() != '/') {
      stack.push_back(tag.substr(0, tag.find_first_of(" \t\n")));
    }
  }
  return stack.empty() && svg.find("<svg") != std::string::npos;
}

TEST(Run, OutputsAreDeterministicAndWellFormed) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const fs::path config = write_config(a, std::string(R"(mesh:
  dimension = 2
  resolution = 6 4
problem:
  mu = 1 0.5
  f0 = 1
  g0 = 0.1
  g_slope = 0.3
control:
  patches = 2
cost:
  a2 = 0.5
  phi = 0 0.2
oc_schedule:
  kind = friction_perturb
  friction_a = 0.1
  length = 4
  expect = convergent
run:
  seed = 9
)"));
  for (const auto& sub : {"solve", "control", "constants"}) {
    invoke({sub, "--config", config.string(), "--out", a.string()});
    invoke({sub, "--config", config.string(), "--out", b.string()});
  }
  int files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto name = entry.path().filename();
    if (name == "experiment.conf") continue;
    ++files;
    EXPECT_EQ(slurp(entry.path()), slurp(b / name)) << name;
    if (entry.path().extension() == ".svg") EXPECT_TRUE(balanced_svg(slurp(entry.path()))) << name;
    if (entry.path().extension() == ".csv") EXPECT_FALSE(slurp(entry.path()).empty()) << name;
  }
  EXPECT_GE(files, 10);
  EXPECT_TRUE(fs::exists(a / "oc_sequence.svg"));
  for (const auto& entry : fs::directory_iterator(a))
    EXPECT_EQ(entry.path().filename().string().find(".tmp"), std::string::npos);
}

TEST(Run, SolveWritesSolutionAndContactTables) {
  const fs::path dir = scratch("solve");
  const fs::path config = write_config(dir, std::string(kBar) + "run:\n  seed = 1\n");
  std::string out;
  EXPECT_EQ(invoke({"solve", "--config", config.string(), "--out", dir.string()}, &out), kExitSuccess);
  const std::string solution = slurp(dir / "solution.csv");
  EXPECT_EQ(solution.rfind("node,x,u\n", 0), 0u);
  EXPECT_EQ(std::count(solution.begin(), solution.end(), '\n'), 66);
  EXPECT_EQ(slurp(dir / "contact.csv").rfind("node,x,u,multiplier,bound\n", 0), 0u);
  EXPECT_EQ(slurp(dir / "solve_report.csv").rfind("iteration,increment,ratio,inner_sweeps\n", 0), 0u);
  EXPECT_NE(out.find("outer_iterations"), std::string::npos);
}

TEST(Run, ConstantsPrintsOneRow) {
  const fs::path dir = scratch("constants");
  const fs::path config = write_config(dir, "mesh:\n  dimension = 1\n  resolution = 32\nproblem:\n  g0 = 1\n  g_slope = 0.5\n");
  std::string out;
  EXPECT_EQ(invoke({"constants", "--config", config.string(), "--out", dir.string()}, &out), kExitSuccess);
  EXPECT_EQ(out.rfind("c0,c3,k,ok\n", 0), 0u);
  EXPECT_NE(out.find(",true\n"), std::string::npos);
}

TEST(Run, NoncontractiveDataIsRejected) {
  const fs::path dir = scratch("noncontractive");
  const fs::path config = write_config(dir, std::string(kBar) + "  g_slope = 2\nrun:\n  seed = 1\n");
  std::string err;
  EXPECT_EQ(invoke({"solve", "--config", config.string(), "--out", dir.string()}, nullptr, &err), kExitUsage);
  EXPECT_FALSE(err.empty());
}

}  // namespace
}  // namespace antiplane
