#include "antiplane/qvi_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace antiplane {

namespace {

double soft_threshold(double r, double t) {
  if (r > t) return r - t;
  if (r < -t) return r + t;
  return 0.0;
}

}  // namespace

TrescaSolver::TrescaSolver(std::shared_ptr<const Mesh> mesh, const SparseMatrix& stiffness)
    : mesh_(std::move(mesh)), stiffness_(stiffness) {
  const Mesh& m = *mesh_;
  if (static_cast<std::size_t>(stiffness_.rows()) != m.node_count() || stiffness_.rows() != stiffness_.cols())
    throw InvalidInput("stiffness dimension does not match the mesh");

  contact_ = m.tagged_nodes(BoundaryTag::Gamma3);
  std::vector<int> smooth_index(m.node_count(), -1);
  std::vector<int> contact_index(m.node_count(), -1);
  for (std::size_t k = 0; k < contact_.size(); ++k) contact_index[contact_[k]] = static_cast<int>(k);
  for (int node : m.free_nodes()) {
    if (contact_index[node] >= 0) continue;
    smooth_index[node] = static_cast<int>(smooth_.size());
    smooth_.push_back(node);
  }

  const auto ns = static_cast<Eigen::Index>(smooth_.size());
  const auto nc = static_cast<Eigen::Index>(contact_.size());
  std::vector<Eigen::Triplet<double>> kss;
  Matrix ksc = Matrix::Zero(ns, nc);
  schur_ = Matrix::Zero(nc, nc);
  for (int col = 0; col < stiffness_.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(stiffness_, col); it; ++it) {
      const auto row = static_cast<std::size_t>(it.row());
      const int rs = smooth_index[row], cs = smooth_index[col];
      const int rc = contact_index[row], cc = contact_index[col];
      if (rs >= 0 && cs >= 0) kss.emplace_back(rs, cs, it.value());
      else if (rs >= 0 && cc >= 0) ksc(rs, cc) = it.value();
      else if (rc >= 0 && cc >= 0) schur_(rc, cc) = it.value();
    }
  }

  if (ns > 0) {
    SparseMatrix k_smooth(ns, ns);
    k_smooth.setFromTriplets(kss.begin(), kss.end());
    smooth_factor_.compute(k_smooth);
    if (smooth_factor_.info() != Eigen::Success || (smooth_factor_.vectorD().array() <= 0.0).any())
      throw SolverError("stiffness is not positive definite on the free nodes");
    coupling_ = smooth_factor_.solve(ksc);
    schur_ -= ksc.transpose() * coupling_;
  } else {
    coupling_ = Matrix::Zero(0, nc);
  }
  for (Eigen::Index i = 0; i < nc; ++i) {
    if (!(schur_(i, i) > 0.0)) throw SolverError("stiffness is not positive definite on the Gamma3 nodes");
  }
}

TrescaResult TrescaSolver::solve(const Vector& load, std::span<const double> thresholds, double tolerance,
                                 int max_sweeps, const ScalarField* warm_start) const {
  const auto ns = static_cast<Eigen::Index>(smooth_.size());
  const auto nc = static_cast<Eigen::Index>(contact_.size());
  if (static_cast<Eigen::Index>(thresholds.size()) != nc)
    throw InvalidInput("one threshold per Gamma3 node is required");
  for (double t : thresholds)
    if (!(t >= 0.0)) throw InvalidInput("friction thresholds must be nonnegative");

  Vector load_s(ns);
  for (Eigen::Index k = 0; k < ns; ++k) load_s[k] = load[smooth_[k]];
  Vector base_s = ns > 0 ? Vector(smooth_factor_.solve(load_s)) : Vector(0);
  Vector b(nc);
  for (Eigen::Index k = 0; k < nc; ++k) b[k] = load[contact_[k]];
  if (ns > 0) b -= coupling_.transpose() * load_s;

  Vector vc = Vector::Zero(nc);
  if (warm_start)
    for (Eigen::Index k = 0; k < nc; ++k) vc[k] = (*warm_start)[contact_[k]];

  auto reduced_energy = [&](const Vector& v, const Vector& sv) {
    double e = 0.5 * v.dot(sv) - b.dot(v);
    for (Eigen::Index k = 0; k < nc; ++k) e += thresholds[k] * std::abs(v[k]);
    return e;
  };

  TrescaResult result;
  Vector sv = schur_ * vc;
  while (nc > 0) {
    if (result.sweeps >= max_sweeps) {
      std::ostringstream msg;
      msg << "Tresca solver exceeded " << max_sweeps << " sweeps (last update " << result.last_update << ")";
      throw SolverError(msg.str(), result.last_update);
    }
    double max_update = 0.0;
    for (Eigen::Index i = 0; i < nc; ++i) {
      const double diag = schur_(i, i);
      const double r = b[i] - sv[i] + diag * vc[i];
      const double next = soft_threshold(r, thresholds[i]) / diag;
      const double d = next - vc[i];
      if (d != 0.0) {
        vc[i] = next;
        sv += d * schur_.col(i);
        max_update = std::max(max_update, std::abs(d));
      }
    }
    ++result.sweeps;
    result.last_update = max_update;
    result.energies.push_back(reduced_energy(vc, sv));
    if (max_update < tolerance) break;
  }

  result.u = ScalarField::Zero(static_cast<Eigen::Index>(mesh_->node_count()));
  for (Eigen::Index k = 0; k < nc; ++k) result.u[contact_[k]] = vc[k];
  if (ns > 0) {
    const Vector vs = base_s - coupling_ * vc;
    for (Eigen::Index k = 0; k < ns; ++k) result.u[smooth_[k]] = vs[k];
  }
  return result;
}

double TrescaSolver::energy(const ScalarField& v, const Vector& load, std::span<const double> thresholds) const {
  double e = 0.5 * v.dot(stiffness_ * v) - load.dot(v);
  for (std::size_t k = 0; k < contact_.size(); ++k) e += thresholds[k] * std::abs(v[contact_[k]]);
  return e;
}

ScalarField solve_tresca(std::shared_ptr<const Mesh> mesh, const SparseMatrix& stiffness, const Vector& load,
                         std::span<const double> thresholds) {
  const SolverConfig defaults;
  TrescaSolver solver(std::move(mesh), stiffness);
  return solver.solve(load, thresholds, defaults.inner_tolerance, defaults.max_inner).u;
}

}  // namespace antiplane
