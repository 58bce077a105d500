#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "antiplane/types.hpp"

namespace antiplane {

struct NelderMeadOptions {
  double initial_step = 0.5;
  double f_tolerance = 1e-14;  ///< spread of simplex values, relative to 1 + |f_best|
  double x_tolerance = 1e-9;   ///< simplex diameter (max-norm)
  int max_iterations = 5000;
  /// Coordinatewise box; trial points are clamped into it.
  std::optional<std::pair<double, double>> box;
};

struct NelderMeadResult {
  Vector x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  /// Best simplex value after each iteration.
  std::vector<double> history;
};

/// Derivative-free simplex descent with the standard coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& objective, const Vector& start,
                             const NelderMeadOptions& options = {});

}  // namespace antiplane
