#include "antiplane/fem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "antiplane/rng.hpp"

namespace antiplane {

namespace {

using Triplet = Eigen::Triplet<double>;

/// Gradients of the barycentric basis on a triangle, scaled by 2 * area.
struct TriangleGradients {
  std::array<double, 3> b;
  std::array<double, 3> c;
  double area;
};

TriangleGradients triangle_gradients(const Mesh& mesh, std::size_t cell) {
  const auto& ids = mesh.cell(cell);
  const Point& p0 = mesh.node(ids[0]);
  const Point& p1 = mesh.node(ids[1]);
  const Point& p2 = mesh.node(ids[2]);
  TriangleGradients g{};
  g.b = {p1[1] - p2[1], p2[1] - p0[1], p0[1] - p1[1]};
  g.c = {p2[0] - p1[0], p0[0] - p2[0], p1[0] - p0[0]};
  g.area = 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
  return g;
}

SparseMatrix weighted_stiffness(const Mesh& mesh, const std::vector<double>& cell_weights) {
  std::vector<Triplet> entries;
  const std::size_t n = mesh.node_count();
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    const auto& ids = mesh.cell(c);
    const double w = cell_weights[c];
    if (mesh.dimension() == 1) {
      const double k = w / mesh.cell_measure(c);
      entries.emplace_back(ids[0], ids[0], k);
      entries.emplace_back(ids[1], ids[1], k);
      entries.emplace_back(ids[0], ids[1], -k);
      entries.emplace_back(ids[1], ids[0], -k);
    } else {
      const auto g = triangle_gradients(mesh, c);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          entries.emplace_back(ids[a], ids[b], w * (g.b[a] * g.b[b] + g.c[a] * g.c[b]) / (4.0 * g.area));
    }
  }
  SparseMatrix k(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  k.setFromTriplets(entries.begin(), entries.end());
  return k;
}

}  // namespace

SparseMatrix restrict_matrix(const Mesh& mesh, const SparseMatrix& full) {
  const auto& free = mesh.free_nodes();
  const auto n = static_cast<Eigen::Index>(free.size());
  std::vector<Eigen::Triplet<double>> entries;
  for (int k = 0; k < full.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(full, k); it; ++it) {
      const int r = mesh.free_index(static_cast<std::size_t>(it.row()));
      const int c = mesh.free_index(static_cast<std::size_t>(it.col()));
      if (r >= 0 && c >= 0) entries.emplace_back(r, c, it.value());
    }
  }
  SparseMatrix out(n, n);
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

CoefficientField::CoefficientField() : fn_([](const Point&) { return 0.0; }), zero_(true) {}

CoefficientField::CoefficientField(Function fn) : fn_(std::move(fn)) {}

CoefficientField CoefficientField::constant(double value) {
  CoefficientField field([value](const Point&) { return value; });
  field.zero_ = value == 0.0;
  return field;
}

CoefficientField CoefficientField::polynomial(std::vector<double> coefficients) {
  if (coefficients.empty() || coefficients.size() > 4)
    throw InvalidInput("polynomial data takes between 1 and 4 coefficients");
  const bool zero = std::all_of(coefficients.begin(), coefficients.end(), [](double c) { return c == 0.0; });
  CoefficientField field([c = std::move(coefficients)](const Point& x) {
    double value = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) value = value * x[0] + *it;
    return value;
  });
  field.zero_ = zero;
  return field;
}

CoefficientField CoefficientField::plus(const CoefficientField& other, double scale) const {
  if (other.zero_ || scale == 0.0) return *this;
  return CoefficientField([a = fn_, b = other.fn_, scale](const Point& x) { return a(x) + scale * b(x); });
}

CoefficientField CoefficientField::scaled(double scale) const {
  if (zero_ || scale == 0.0) return CoefficientField::constant(0.0);
  return CoefficientField([a = fn_, scale](const Point& x) { return scale * a(x); });
}

FrictionBound::FrictionBound() : rule_([](const Point&, double) { return 0.0; }) {}

FrictionBound::FrictionBound(Rule rule, double lipschitz) : rule_(std::move(rule)), lipschitz_(lipschitz) {
  if (lipschitz < 0.0) throw InvalidInput("friction Lipschitz constant must be nonnegative");
}

FrictionBound FrictionBound::constant(double g0) {
  if (g0 < 0.0) throw InvalidInput("friction bound must be nonnegative");
  return FrictionBound([g0](const Point&, double) { return g0; }, 0.0);
}

FrictionBound FrictionBound::affine(double g0, double slope) {
  if (g0 < 0.0) throw InvalidInput("friction bound must be nonnegative at zero slip");
  return FrictionBound([g0, slope](const Point&, double r) { return std::max(0.0, g0 + slope * std::abs(r)); },
                       std::abs(slope));
}

FrictionBound FrictionBound::perturbed(double delta, double a, double b) const {
  if (delta == 0.0) return *this;
  return FrictionBound(
      [base = rule_, delta, a, b](const Point& x, double r) {
        return std::max(0.0, base(x, r) + delta * (a + b * std::abs(r)));
      },
      lipschitz_ + std::abs(delta * b));
}

FrictionBound FrictionBound::scaled(double scale) const {
  if (scale < 0.0) throw InvalidInput("friction bound scale must be nonnegative");
  return FrictionBound([base = rule_, scale](const Point& x, double r) { return scale * base(x, r); },
                       scale * lipschitz_);
}

void check_friction_bound(const Mesh& mesh, const FrictionBound& g, std::uint64_t seed, int samples) {
  std::vector<Point> points;
  for (const Facet& f : mesh.facets(BoundaryTag::Gamma3)) points.push_back(f.midpoint);
  for (int node : mesh.tagged_nodes(BoundaryTag::Gamma3)) points.push_back(mesh.node(node));
  if (points.empty()) return;
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    const Point& x = points[static_cast<std::size_t>(rng.uniform() * points.size())];
    const double r1 = rng.uniform(-10.0, 10.0);
    const double r2 = rng.uniform(-10.0, 10.0);
    const double g1 = g(x, r1);
    const double g2 = g(x, r2);
    if (g1 < 0.0 || g2 < 0.0) throw InvalidInput("friction bound takes a negative value");
    const double allowed = g.lipschitz() * std::abs(r1 - r2);
    if (std::abs(g1 - g2) > allowed + 1e-12 * (1.0 + std::abs(g1) + std::abs(g2))) {
      std::ostringstream msg;
      msg << "friction bound violates its declared Lipschitz constant " << g.lipschitz() << " at r = " << r1
          << ", " << r2;
      throw InvalidInput(msg.str());
    }
  }
}

SparseMatrix assemble_stiffness(const Mesh& mesh, const CoefficientField& mu, double mu_star) {
  if (!(mu_star > 0.0)) throw InvalidInput("mu_star must be positive");
  std::vector<double> weights(mesh.cell_count());
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    weights[c] = mu(mesh.cell_midpoint(c));
    if (!(weights[c] >= mu_star)) {
      std::ostringstream msg;
      msg << "Lame coefficient " << weights[c] << " in cell " << c << " is below mu_star = " << mu_star;
      throw InvalidInput(msg.str());
    }
  }
  return weighted_stiffness(mesh, weights);
}

SparseMatrix assemble_gradient_stiffness(const Mesh& mesh) {
  return weighted_stiffness(mesh, std::vector<double>(mesh.cell_count(), 1.0));
}

SparseMatrix assemble_mass(const Mesh& mesh) {
  std::vector<Triplet> entries;
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    const auto& ids = mesh.cell(c);
    const double m = mesh.cell_measure(c);
    const int n = mesh.cell_size();
    // 1D: h/6 [2 1; 1 2], 2D: |T|/12 [2 1 1; 1 2 1; 1 1 2]
    const double off = mesh.dimension() == 1 ? m / 6.0 : m / 12.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) entries.emplace_back(ids[a], ids[b], a == b ? 2.0 * off : off);
  }
  const auto n = static_cast<Eigen::Index>(mesh.node_count());
  SparseMatrix mass(n, n);
  mass.setFromTriplets(entries.begin(), entries.end());
  return mass;
}

Vector assemble_body_load(const Mesh& mesh, const CoefficientField& f0) {
  Vector load = Vector::Zero(static_cast<Eigen::Index>(mesh.node_count()));
  if (f0.is_zero()) return load;
  const int n = mesh.cell_size();
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    const double share = f0(mesh.cell_midpoint(c)) * mesh.cell_measure(c) / n;
    for (int a = 0; a < n; ++a) load[mesh.cell(c)[a]] += share;
  }
  return load;
}

Vector assemble_traction_load(const Mesh& mesh, std::span<const double> facet_values) {
  const auto& facets = mesh.facets(BoundaryTag::Gamma2);
  if (facet_values.size() != facets.size())
    throw InvalidInput("traction data must supply one value per Gamma2 facet");
  Vector load = Vector::Zero(static_cast<Eigen::Index>(mesh.node_count()));
  for (std::size_t k = 0; k < facets.size(); ++k) {
    const Facet& f = facets[k];
    const double share = facet_values[k] * f.measure / f.node_count;
    for (int a = 0; a < f.node_count; ++a) load[f.nodes[a]] += share;
  }
  return load;
}

std::vector<double> sample_traction(const Mesh& mesh, const CoefficientField& f2) {
  std::vector<double> values;
  for (const Facet& f : mesh.facets(BoundaryTag::Gamma2)) values.push_back(f2(f.midpoint));
  return values;
}

Vector assemble_load(const Mesh& mesh, const CoefficientField& f0, const CoefficientField& f2,
                     std::vector<std::string>* warnings) {
  Vector load = assemble_body_load(mesh, f0);
  if (mesh.facets(BoundaryTag::Gamma2).empty()) {
    if (!f2.is_zero() && warnings)
      warnings->push_back("traction f2 given but Gamma2 is empty; surface term dropped");
    return load;
  }
  const auto values = sample_traction(mesh, f2);
  load += assemble_traction_load(mesh, values);
  return load;
}

ScalarField interpolate(const Mesh& mesh, const CoefficientField& field) {
  ScalarField v(static_cast<Eigen::Index>(mesh.node_count()));
  for (std::size_t i = 0; i < mesh.node_count(); ++i) v[i] = mesh.is_dirichlet(i) ? 0.0 : field(mesh.node(i));
  return v;
}

double eval_j(const Mesh& mesh, const FrictionBound& g, const ScalarField& eta, const ScalarField& v) {
  const auto& nodes = mesh.tagged_nodes(BoundaryTag::Gamma3);
  const auto& weights = mesh.contact_weights();
  double total = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const int i = nodes[k];
    total += weights[k] * g(mesh.node(i), std::abs(eta[i])) * std::abs(v[i]);
  }
  return total;
}

double sup_norm_on_cells(const Mesh& mesh, const CoefficientField& field) {
  double best = 0.0;
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) best = std::max(best, std::abs(field(mesh.cell_midpoint(c))));
  return best;
}

double inf_on_cells(const Mesh& mesh, const CoefficientField& field) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) best = std::min(best, field(mesh.cell_midpoint(c)));
  return best;
}

NormOperator::NormOperator(const Mesh& mesh)
    : mass_(assemble_mass(mesh)), stiffness_(assemble_gradient_stiffness(mesh)), gram_(mass_ + stiffness_) {}

double NormOperator::inner(const ScalarField& v, const ScalarField& w) const { return v.dot(gram_ * w); }

double NormOperator::norm(const ScalarField& v) const { return std::sqrt(std::max(0.0, inner(v, v))); }

double NormOperator::l2_norm(const ScalarField& v) const { return std::sqrt(std::max(0.0, v.dot(mass_ * v))); }

double NormOperator::gradient_norm(const ScalarField& v) const {
  return std::sqrt(std::max(0.0, v.dot(stiffness_ * v)));
}

double v_norm(const Mesh& mesh, const ScalarField& v) {
  if (static_cast<std::size_t>(v.size()) != mesh.node_count())
    throw InvalidInput("field length does not match the node count");
  return NormOperator(mesh).norm(v);
}

}  // namespace antiplane
