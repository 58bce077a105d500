#include "antiplane/config.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace antiplane {

ConfigError::ConfigError(const std::string& what, int line)
    : InvalidInput(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::string token;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == ',') {
      if (!token.empty()) out.push_back(std::move(token)), token.clear();
    } else {
      token += c;
    }
  }
  if (!token.empty()) out.push_back(std::move(token));
  return out;
}

/// One `key = value` line being converted.
struct Entry {
  std::string key;
  std::string value;
  int line;

  [[noreturn]] void fail(const std::string& expected) const {
    throw ConfigError("'" + key + "' expects " + expected + ", got '" + value + "'", line);
  }

  double real_token(const std::string& token) const {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || end != token.data() + token.size() || !std::isfinite(v)) fail("a real number");
    return v;
  }

  double real() const {
    const auto w = words(value);
    if (w.size() != 1) fail("a real number");
    return real_token(w[0]);
  }

  long long integer_token(const std::string& token) const {
    long long v = 0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || end != token.data() + token.size()) fail("an integer");
    return v;
  }

  int integer() const {
    const auto w = words(value);
    if (w.size() != 1) fail("an integer");
    const long long v = integer_token(w[0]);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) fail("an integer");
    return static_cast<int>(v);
  }

  std::uint64_t unsigned64() const {
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || end != value.data() + value.size()) fail("a nonnegative integer");
    return v;
  }

  bool boolean() const {
    if (value == "true" || value == "yes" || value == "1") return true;
    if (value == "false" || value == "no" || value == "0") return false;
    fail("true or false");
  }

  std::vector<double> reals(std::size_t min, std::size_t max) const {
    const auto w = words(value);
    if (w.size() < min || w.size() > max) fail(std::to_string(min) + " to " + std::to_string(max) + " real numbers");
    std::vector<double> out;
    for (const auto& t : w) out.push_back(real_token(t));
    return out;
  }

  template <class E>
  E choice(const std::map<std::string, E>& options) const {
    const auto it = options.find(value);
    if (it != options.end()) return it->second;
    std::string names;
    for (const auto& [name, _] : options) names += (names.empty() ? "" : "|") + name;
    fail("one of " + names);
  }
};

const std::map<std::string, BoundaryTag> kTags{
    {"gamma1", BoundaryTag::Gamma1}, {"gamma2", BoundaryTag::Gamma2}, {"gamma3", BoundaryTag::Gamma3}};
const std::map<std::string, DecayLaw> kDecay{{"harmonic", DecayLaw::Harmonic},
                                             {"geometric", DecayLaw::Geometric},
                                             {"zero", DecayLaw::Zero},
                                             {"alternating", DecayLaw::Alternating}};
const std::map<std::string, Verdict> kVerdict{{"convergent", Verdict::Convergent},
                                              {"non-convergent", Verdict::NonConvergent}};

using Setter = std::function<void(ExperimentConfig&, const Entry&)>;
using Schema = std::map<std::string, std::map<std::string, Setter>>;

const Schema& schema() {
  static const Schema s = [] {
    Schema s;
    auto& mesh = s["mesh"];
    mesh["dimension"] = [](ExperimentConfig& c, const Entry& e) { c.mesh.dimension = e.integer(); };
    mesh["extent"] = [](ExperimentConfig& c, const Entry& e) {
      const auto v = e.reals(1, 2);
      c.mesh.extents = {v[0], v.size() > 1 ? v[1] : 1.0};
    };
    mesh["resolution"] = [](ExperimentConfig& c, const Entry& e) {
      const auto w = words(e.value);
      if (w.empty() || w.size() > 2) e.fail("one or two integers");
      c.mesh.resolution = {static_cast<int>(e.integer_token(w[0])),
                           w.size() > 1 ? static_cast<int>(e.integer_token(w[1])) : 1};
    };
    for (auto [name, side] : {std::pair{"left", Side::Left}, std::pair{"right", Side::Right},
                              std::pair{"bottom", Side::Bottom}, std::pair{"top", Side::Top}})
      mesh[name] = [side = side](ExperimentConfig& c, const Entry& e) { c.mesh.partition[side] = e.choice(kTags); };

    auto& problem = s["problem"];
    problem["mu"] = [](ExperimentConfig& c, const Entry& e) { c.problem.mu = e.reals(1, 4); };
    problem["mu_star"] = [](ExperimentConfig& c, const Entry& e) { c.problem.mu_star = e.real(); };
    problem["f0"] = [](ExperimentConfig& c, const Entry& e) { c.problem.f0 = e.reals(1, 4); };
    problem["f2"] = [](ExperimentConfig& c, const Entry& e) { c.problem.f2 = e.reals(1, 4); };
    problem["g0"] = [](ExperimentConfig& c, const Entry& e) { c.problem.g0 = e.real(); };
    problem["g_slope"] = [](ExperimentConfig& c, const Entry& e) { c.problem.g_slope = e.real(); };

    auto& solver = s["solver"];
    solver["outer_tolerance"] = [](ExperimentConfig& c, const Entry& e) { c.solver.outer_tolerance = e.real(); };
    solver["inner_tolerance"] = [](ExperimentConfig& c, const Entry& e) { c.solver.inner_tolerance = e.real(); };
    solver["max_outer"] = [](ExperimentConfig& c, const Entry& e) { c.solver.max_outer = e.integer(); };
    solver["max_inner"] = [](ExperimentConfig& c, const Entry& e) { c.solver.max_inner = e.integer(); };
    solver["allow_noncontractive"] = [](ExperimentConfig& c, const Entry& e) {
      c.solver.allow_noncontractive = e.boolean();
    };
    solver["ratio_slack"] = [](ExperimentConfig& c, const Entry& e) { c.solver.ratio_slack = e.real(); };

    auto& schedule = s["schedule"];
    schedule["kind"] = [](ExperimentConfig& c, const Entry& e) {
      c.schedule.kind = e.choice(std::map<std::string, ScheduleKind>{
          {"eps_decay", ScheduleKind::EpsDecay},
          {"load_perturb", ScheduleKind::LoadPerturb},
          {"traction_perturb", ScheduleKind::TractionPerturb},
          {"friction_perturb", ScheduleKind::FrictionPerturb},
          {"lame_perturb", ScheduleKind::LamePerturb},
          {"adversarial_load", ScheduleKind::AdversarialLoad}});
    };
    schedule["decay"] = [](ExperimentConfig& c, const Entry& e) { c.schedule.decay = e.choice(kDecay); };
    schedule["amplitude"] = [](ExperimentConfig& c, const Entry& e) { c.schedule.amplitude = e.real(); };
    schedule["shape"] = [](ExperimentConfig& c, const Entry& e) { c.schedule.shape = e.reals(1, 4); };
    schedule["friction_a"] = [](ExperimentConfig& c, const Entry& e) { c.schedule.friction_a = e.real(); };
    schedule["friction_b"] = [](ExperimentConfig& c, const Entry& e) { c.schedule.friction_b = e.real(); };
    schedule["target_f0"] = [](ExperimentConfig& c, const Entry& e) { c.schedule.target_f0 = e.reals(1, 4); };
    schedule["length"] = [](ExperimentConfig& c, const Entry& e) { c.schedule.length = e.integer(); };
    schedule["expect"] = [](ExperimentConfig& c, const Entry& e) { c.schedule.expect = e.choice(kVerdict); };

    auto& validate = s["validate"];
    validate["case"] = [](ExperimentConfig& c, const Entry& e) {
      const auto v = e.reals(3, 3);
      c.validate.cases.push_back({v[0], v[1], v[2]});
    };
    validate["elements"] = [](ExperimentConfig& c, const Entry& e) { c.validate.elements = e.integer(); };
    validate["tolerance"] = [](ExperimentConfig& c, const Entry& e) { c.validate.tolerance = e.real(); };

    auto& control = s["control"];
    control["patches"] = [](ExperimentConfig& c, const Entry& e) { c.control.patches = e.integer(); };
    control["box"] = [](ExperimentConfig& c, const Entry& e) {
      const auto v = e.reals(2, 2);
      c.control.box = std::pair{v[0], v[1]};
    };
    control["starts"] = [](ExperimentConfig& c, const Entry& e) { c.control.starts = e.integer(); };
    control["start_radius"] = [](ExperimentConfig& c, const Entry& e) { c.control.start_radius = e.real(); };

    auto& cost = s["cost"];
    cost["a0"] = [](ExperimentConfig& c, const Entry& e) { c.cost.a0 = e.real(); };
    cost["a2"] = [](ExperimentConfig& c, const Entry& e) { c.cost.a2 = e.real(); };
    cost["phi"] = [](ExperimentConfig& c, const Entry& e) { c.cost.phi = e.reals(1, 4); };

    auto& oc = s["oc_schedule"];
    oc["kind"] = [](ExperimentConfig& c, const Entry& e) {
      c.oc_schedule.kind = e.choice(std::map<std::string, OCScheduleKind>{
          {"target_perturb", OCScheduleKind::TargetPerturb},
          {"load_perturb", OCScheduleKind::LoadPerturb},
          {"friction_perturb", OCScheduleKind::FrictionPerturb}});
    };
    oc["decay"] = [](ExperimentConfig& c, const Entry& e) { c.oc_schedule.decay = e.choice(kDecay); };
    oc["amplitude"] = [](ExperimentConfig& c, const Entry& e) { c.oc_schedule.amplitude = e.real(); };
    oc["psi"] = [](ExperimentConfig& c, const Entry& e) { c.oc_schedule.psi = e.reals(1, 4); };
    oc["shape"] = [](ExperimentConfig& c, const Entry& e) { c.oc_schedule.shape = e.reals(1, 4); };
    oc["friction_a"] = [](ExperimentConfig& c, const Entry& e) { c.oc_schedule.friction_a = e.real(); };
    oc["friction_b"] = [](ExperimentConfig& c, const Entry& e) { c.oc_schedule.friction_b = e.real(); };
    oc["length"] = [](ExperimentConfig& c, const Entry& e) { c.oc_schedule.length = e.integer(); };
    oc["expect"] = [](ExperimentConfig& c, const Entry& e) { c.oc_schedule.expect = e.choice(kVerdict); };

    auto& run = s["run"];
    run["seed"] = [](ExperimentConfig& c, const Entry& e) {
      c.seed = e.unsigned64();
      c.solver.seed = *c.seed;
    };
    run["out"] = [](ExperimentConfig& c, const Entry& e) { c.out = e.value; };
    return s;
  }();
  return s;
}

void default_partition(MeshSpec& mesh) {
  auto fill = [&](Side side, BoundaryTag tag) { mesh.partition.emplace(side, tag); };
  fill(Side::Left, BoundaryTag::Gamma1);
  if (mesh.dimension == 1) {
    fill(Side::Right, BoundaryTag::Gamma3);
  } else {
    fill(Side::Right, BoundaryTag::Gamma2);
    fill(Side::Bottom, BoundaryTag::Gamma3);
    fill(Side::Top, BoundaryTag::Gamma2);
  }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig config;
  config.mesh.dimension = 1;
  config.mesh.resolution = {64, 1};
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  const std::map<std::string, Setter>* section = nullptr;
  std::string section_name;
  std::set<std::string> seen_keys;
  while (std::getline(in, raw)) {
    ++line;
    const std::string content = trim(raw.substr(0, raw.find('#')));
    if (content.empty()) continue;
    if (content.back() == ':' && content.find('=') == std::string::npos) {
      section_name = trim(content.substr(0, content.size() - 1));
      const auto it = schema().find(section_name);
      if (it == schema().end()) throw ConfigError("unknown section '" + section_name + "'", line);
      if (!config.sections.insert(section_name).second)
        throw ConfigError("section '" + section_name + "' appears twice", line);
      section = &it->second;
      continue;
    }
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value' or 'section:'", line);
    if (!section) throw ConfigError("key outside of any section", line);
    Entry entry{trim(content.substr(0, eq)), trim(content.substr(eq + 1)), line};
    const auto it = section->find(entry.key);
    if (it == section->end())
      throw ConfigError("unknown key '" + entry.key + "' in section '" + section_name + "'", line);
    if (entry.value.empty()) throw ConfigError("'" + entry.key + "' has no value", line);
    // Repeated `case` lines accumulate; any other repeat is a mistake.
    if (entry.key != "case" && !seen_keys.insert(section_name + "." + entry.key).second)
      throw ConfigError("'" + entry.key + "' is set twice", line);
    it->second(config, entry);
  }
  default_partition(config.mesh);
  return config;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'", 0);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

}  // namespace antiplane
