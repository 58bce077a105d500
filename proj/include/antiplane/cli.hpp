#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "antiplane/config.hpp"

namespace antiplane {

enum ExitCode : int { kExitSuccess = 0, kExitVerdictFailure = 1, kExitUsage = 2 };

const std::vector<std::string>& subcommands();

/// Problem data described by the `mesh` and `problem` sections.
ProblemData build_problem(const ExperimentConfig& config);

/// Runs one subcommand, writing CSV/SVG files under `config.out`. Messages go to
/// `out` and diagnostics to `err`. Returns an ExitCode.
int run(const std::string& subcommand, const ExperimentConfig& config, std::ostream& out, std::ostream& err);

/// `antiplane <subcommand> --config <path> [--out <dir>] [--seed <u64>]`
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace antiplane
