#include "antiplane/mesh.hpp"

#include <algorithm>
#include <string>

namespace antiplane {

namespace {

std::size_t tag_slot(BoundaryTag tag) { return static_cast<std::size_t>(tag); }

std::vector<Side> sides_for(int dimension) {
  if (dimension == 1) return {Side::Left, Side::Right};
  return {Side::Left, Side::Right, Side::Bottom, Side::Top};
}

void validate(const MeshSpec& spec) {
  if (spec.dimension != 1 && spec.dimension != 2)
    throw InvalidInput("mesh dimension must be 1 or 2");
  for (int axis = 0; axis < spec.dimension; ++axis) {
    if (!(spec.extents[axis] > 0.0)) throw InvalidInput("mesh extents must be positive");
    if (spec.resolution[axis] < 1) throw InvalidInput("mesh resolution must be at least 1 per axis");
  }
  const auto sides = sides_for(spec.dimension);
  for (const auto& [side, tag] : spec.partition) {
    if (std::find(sides.begin(), sides.end(), side) == sides.end())
      throw InvalidInput(std::string("side '") + to_string(side) + "' does not exist in " +
                         std::to_string(spec.dimension) + "D");
  }
  bool has_dirichlet = false;
  for (Side side : sides) {
    auto it = spec.partition.find(side);
    if (it == spec.partition.end())
      throw InvalidInput(std::string("boundary side '") + to_string(side) + "' carries no tag");
    has_dirichlet = has_dirichlet || it->second == BoundaryTag::Gamma1;
  }
  if (!has_dirichlet) throw InvalidInput("Gamma1 must contain at least one boundary side");
}

}  // namespace

const char* to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Gamma1: return "gamma1";
    case BoundaryTag::Gamma2: return "gamma2";
    case BoundaryTag::Gamma3: return "gamma3";
  }
  return "?";
}

const char* to_string(Side side) {
  switch (side) {
    case Side::Left: return "left";
    case Side::Right: return "right";
    case Side::Bottom: return "bottom";
    case Side::Top: return "top";
  }
  return "?";
}

Point Mesh::cell_midpoint(std::size_t c) const {
  const auto& ids = cells_[c];
  Point mid{0.0, 0.0};
  const int n = cell_size();
  for (int k = 0; k < n; ++k) {
    mid[0] += coords_[ids[k]][0];
    mid[1] += coords_[ids[k]][1];
  }
  mid[0] /= n;
  mid[1] /= n;
  return mid;
}

const std::vector<Facet>& Mesh::facets(BoundaryTag tag) const { return facets_[tag_slot(tag)]; }

const std::vector<int>& Mesh::tagged_nodes(BoundaryTag tag) const {
  return tagged_nodes_[tag_slot(tag)];
}

Mesh build_mesh(const MeshSpec& spec) {
  validate(spec);
  Mesh mesh;
  mesh.dimension_ = spec.dimension;
  mesh.extents_ = spec.extents;
  mesh.resolution_ = spec.resolution;

  std::vector<Facet> all_facets;
  if (spec.dimension == 1) {
    const int n = spec.resolution[0];
    const double h = spec.extents[0] / n;
    for (int i = 0; i <= n; ++i) mesh.coords_.push_back({i * h, 0.0});
    for (int i = 0; i < n; ++i) {
      mesh.cells_.push_back({i, i + 1, -1});
      mesh.measures_.push_back(h);
    }
    all_facets.push_back({{0, -1}, 1, 1.0, mesh.coords_[0], Side::Left});
    all_facets.push_back({{n, -1}, 1, 1.0, mesh.coords_[n], Side::Right});
  } else {
    const int nx = spec.resolution[0];
    const int ny = spec.resolution[1];
    const double hx = spec.extents[0] / nx;
    const double hy = spec.extents[1] / ny;
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) mesh.coords_.push_back({i * hx, j * hy});
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
        mesh.cells_.push_back({a, b, c});
        mesh.cells_.push_back({a, c, d});
        mesh.measures_.push_back(0.5 * hx * hy);
        mesh.measures_.push_back(0.5 * hx * hy);
      }
    }
    auto edge = [&](int p, int q, double length, Side side) {
      const Point& x = mesh.coords_[p];
      const Point& y = mesh.coords_[q];
      all_facets.push_back({{p, q}, 2, length, {0.5 * (x[0] + y[0]), 0.5 * (x[1] + y[1])}, side});
    };
    for (int i = 0; i < nx; ++i) edge(id(i, 0), id(i + 1, 0), hx, Side::Bottom);
    for (int i = 0; i < nx; ++i) edge(id(i, ny), id(i + 1, ny), hx, Side::Top);
    for (int j = 0; j < ny; ++j) edge(id(0, j), id(0, j + 1), hy, Side::Left);
    for (int j = 0; j < ny; ++j) edge(id(nx, j), id(nx, j + 1), hy, Side::Right);
  }

  for (const Facet& f : all_facets) {
    const BoundaryTag tag = spec.partition.at(f.side);
    mesh.facets_[tag_slot(tag)].push_back(f);
  }

  const std::size_t n_nodes = mesh.coords_.size();
  mesh.node_tags_.assign(n_nodes, std::nullopt);
  for (BoundaryTag tag : {BoundaryTag::Gamma1, BoundaryTag::Gamma3, BoundaryTag::Gamma2}) {
    for (const Facet& f : mesh.facets_[tag_slot(tag)]) {
      for (int k = 0; k < f.node_count; ++k) {
        auto& slot = mesh.node_tags_[f.nodes[k]];
        if (!slot) slot = tag;
      }
    }
  }
  for (std::size_t i = 0; i < n_nodes; ++i) {
    if (mesh.node_tags_[i]) mesh.tagged_nodes_[tag_slot(*mesh.node_tags_[i])].push_back(static_cast<int>(i));
  }

  mesh.free_index_.assign(n_nodes, -1);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    if (mesh.node_tags_[i] == BoundaryTag::Gamma1) continue;
    mesh.free_index_[i] = static_cast<int>(mesh.free_nodes_.size());
    mesh.free_nodes_.push_back(static_cast<int>(i));
  }

  const auto& contact = mesh.tagged_nodes_[tag_slot(BoundaryTag::Gamma3)];
  mesh.contact_weights_.assign(contact.size(), 0.0);
  for (const Facet& f : mesh.facets_[tag_slot(BoundaryTag::Gamma3)]) {
    for (int k = 0; k < f.node_count; ++k) {
      auto it = std::lower_bound(contact.begin(), contact.end(), f.nodes[k]);
      if (it != contact.end() && *it == f.nodes[k])
        mesh.contact_weights_[it - contact.begin()] += f.measure / f.node_count;
    }
  }
  return mesh;
}

Vector restrict_to_free(const Mesh& mesh, const Vector& full) {
  const auto& free = mesh.free_nodes();
  Vector out(free.size());
  for (std::size_t k = 0; k < free.size(); ++k) out[k] = full[free[k]];
  return out;
}

Vector extend_from_free(const Mesh& mesh, const Vector& free_values) {
  Vector out = Vector::Zero(mesh.node_count());
  const auto& free = mesh.free_nodes();
  for (std::size_t k = 0; k < free.size(); ++k) out[free[k]] = free_values[k];
  return out;
}

}  // namespace antiplane
