#include "antiplane/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace antiplane {

NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& objective, const Vector& start,
                             const NelderMeadOptions& options) {
  const Eigen::Index d = start.size();
  if (d < 1) throw InvalidInput("Nelder-Mead needs at least one variable");

  NelderMeadResult result;
  auto clamp = [&](Vector x) {
    if (options.box) x = x.cwiseMax(options.box->first).cwiseMin(options.box->second);
    return x;
  };
  auto eval = [&](const Vector& x) {
    ++result.evaluations;
    return objective(x);
  };

  std::vector<Vector> simplex;
  std::vector<double> values;
  simplex.push_back(clamp(start));
  for (Eigen::Index i = 0; i < d; ++i) {
    Vector x = simplex.front();
    x[i] += options.initial_step;
    x = clamp(x);
    // A vertex clamped onto the start would make the simplex degenerate.
    if (x[i] == simplex.front()[i]) x[i] -= options.initial_step, x = clamp(x);
    simplex.push_back(std::move(x));
  }
  for (const Vector& x : simplex) values.push_back(eval(x));

  std::vector<std::size_t> order(simplex.size());
  auto sort_simplex = [&]() {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<Vector> s;
    std::vector<double> v;
    for (std::size_t k : order) {
      s.push_back(simplex[k]);
      v.push_back(values[k]);
    }
    simplex = std::move(s);
    values = std::move(v);
  };

  sort_simplex();
  while (result.iterations < options.max_iterations) {
    double diameter = 0.0;
    for (std::size_t k = 1; k < simplex.size(); ++k)
      diameter = std::max(diameter, (simplex[k] - simplex[0]).cwiseAbs().maxCoeff());
    const double spread = values.back() - values.front();
    if (spread <= options.f_tolerance * (1.0 + std::abs(values.front())) && diameter <= options.x_tolerance) {
      result.converged = true;
      break;
    }
    ++result.iterations;

    Vector centroid = Vector::Zero(d);
    for (std::size_t k = 0; k + 1 < simplex.size(); ++k) centroid += simplex[k];
    centroid /= static_cast<double>(d);
    const Vector& worst = simplex.back();

    const Vector reflected = clamp(centroid + (centroid - worst));
    const double f_reflected = eval(reflected);
    if (f_reflected < values.front()) {
      const Vector expanded = clamp(centroid + 2.0 * (centroid - worst));
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        simplex.back() = expanded;
        values.back() = f_expanded;
      } else {
        simplex.back() = reflected;
        values.back() = f_reflected;
      }
    } else if (f_reflected < values[values.size() - 2]) {
      simplex.back() = reflected;
      values.back() = f_reflected;
    } else {
      const bool outside = f_reflected < values.back();
      const Vector contracted = outside ? clamp(centroid + 0.5 * (reflected - centroid))
                                        : clamp(centroid + 0.5 * (worst - centroid));
      const double f_contracted = eval(contracted);
      if (f_contracted < std::min(f_reflected, values.back())) {
        simplex.back() = contracted;
        values.back() = f_contracted;
      } else {
        for (std::size_t k = 1; k < simplex.size(); ++k) {
          simplex[k] = clamp(simplex[0] + 0.5 * (simplex[k] - simplex[0]));
          values[k] = eval(simplex[k]);
        }
      }
    }
    sort_simplex();
    result.history.push_back(values.front());
  }
  result.x = simplex.front();
  result.value = values.front();
  return result;
}

}  // namespace antiplane
