#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "antiplane/mesh.hpp"
#include "antiplane/optimal_control.hpp"
#include "antiplane/qvi_solver.hpp"
#include "antiplane/tykhonov.hpp"

namespace antiplane {

/// Parse or validation failure; `line` is 0 when the problem is not tied to a line.
class ConfigError : public InvalidInput {
 public:
  ConfigError(const std::string& what, int line);
  int line() const { return line_; }

 private:
  int line_;
};

/// Polynomial in x, lowest degree first.
using Polynomial = std::vector<double>;

struct ProblemSection {
  Polynomial mu{1.0};
  std::optional<double> mu_star;  ///< defaults to the smallest sampled mu
  Polynomial f0{0.0};
  Polynomial f2{0.0};
  double g0 = 0.0;
  double g_slope = 0.0;  ///< g(r) = max(0, g0 + g_slope |r|)
};

struct ScheduleSection {
  ScheduleKind kind = ScheduleKind::LoadPerturb;
  DecayLaw decay = DecayLaw::Harmonic;
  double amplitude = 1.0;
  Polynomial shape{1.0};
  double friction_a = 1.0;
  double friction_b = 0.0;
  Polynomial target_f0{0.0};
  int length = 64;
  std::optional<Verdict> expect;
};

struct ValidateSection {
  std::vector<std::array<double, 3>> cases;  ///< (mu, f0, g)
  int elements = 256;
  double tolerance = 1e-3;
};

struct ControlSection {
  int patches = 1;
  std::optional<std::pair<double, double>> box;
  int starts = 4;
  double start_radius = 2.0;
};

struct CostSection {
  double a0 = 1.0;
  double a2 = 1.0;
  Polynomial phi{0.0};
};

struct OCScheduleSection {
  OCScheduleKind kind = OCScheduleKind::TargetPerturb;
  DecayLaw decay = DecayLaw::Harmonic;
  double amplitude = 1.0;
  Polynomial psi{0.0};
  Polynomial shape{1.0};
  double friction_a = 1.0;
  double friction_b = 0.0;
  int length = 32;
  std::optional<Verdict> expect;
};

/// Parsed experiment description. Sections absent from the file keep their
/// defaults and are not listed in `sections`.
struct ExperimentConfig {
  std::set<std::string> sections;
  MeshSpec mesh;
  ProblemSection problem;
  SolverConfig solver;
  ScheduleSection schedule;
  ValidateSection validate;
  ControlSection control;
  CostSection cost;
  OCScheduleSection oc_schedule;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = "out";

  bool has(const std::string& section) const { return sections.count(section) > 0; }
};

/// Line-based format:
///
///   # comment
///   mesh:
///     dimension = 2
///     resolution = 16 8
///
/// Unknown sections or keys, malformed values and duplicates are errors naming the line.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::filesystem::path& path);

}  // namespace antiplane
