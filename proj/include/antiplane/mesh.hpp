#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "antiplane/types.hpp"

namespace antiplane {

enum class BoundaryTag { Gamma1, Gamma2, Gamma3 };

/// Sides of the interval (Left/Right) or the rectangle (all four).
enum class Side { Left, Right, Bottom, Top };

const char* to_string(BoundaryTag tag);
const char* to_string(Side side);

struct MeshSpec {
  int dimension = 1;
  std::array<double, 2> extents{1.0, 1.0};
  std::array<int, 2> resolution{1, 1};
  /// Every side of the domain must be assigned exactly one tag.
  std::map<Side, BoundaryTag> partition;
};

/// Boundary facet: a point (1D, measure 1) or an edge (2D).
struct Facet {
  std::array<int, 2> nodes{-1, -1};
  int node_count = 0;
  double measure = 0.0;
  Point midpoint{0.0, 0.0};
  Side side = Side::Left;
};

/// Structured P1 mesh of an interval or rectangle.
///
/// Node sets follow the precedence Gamma1 > Gamma3 > Gamma2 for nodes shared by
/// facets of different tags. Facet lists keep the tag of their side.
class Mesh {
 public:
  int dimension() const { return dimension_; }
  std::size_t node_count() const { return coords_.size(); }
  std::size_t cell_count() const { return cells_.size(); }
  /// Vertices per cell: 2 for segments, 3 for triangles.
  int cell_size() const { return dimension_ == 1 ? 2 : 3; }

  const Point& node(std::size_t i) const { return coords_[i]; }
  const std::vector<Point>& nodes() const { return coords_; }
  const std::array<int, 3>& cell(std::size_t c) const { return cells_[c]; }
  double cell_measure(std::size_t c) const { return measures_[c]; }
  Point cell_midpoint(std::size_t c) const;

  const std::vector<Facet>& facets(BoundaryTag tag) const;
  const std::vector<int>& tagged_nodes(BoundaryTag tag) const;
  /// Tag of a boundary node after precedence, empty for interior nodes.
  std::optional<BoundaryTag> node_tag(std::size_t i) const { return node_tags_[i]; }
  bool is_dirichlet(std::size_t i) const { return node_tags_[i] == BoundaryTag::Gamma1; }

  /// Nodes not on Gamma1, in increasing order.
  const std::vector<int>& free_nodes() const { return free_nodes_; }
  /// Position of node i inside free_nodes(), or -1 on Gamma1.
  int free_index(std::size_t i) const { return free_index_[i]; }

  /// Lumped Gamma3 weight of each node in tagged_nodes(Gamma3), same order.
  const std::vector<double>& contact_weights() const { return contact_weights_; }

  double extent(int axis) const { return extents_[axis]; }
  int resolution(int axis) const { return resolution_[axis]; }

 private:
  friend Mesh build_mesh(const MeshSpec& spec);

  int dimension_ = 1;
  std::array<double, 2> extents_{1.0, 1.0};
  std::array<int, 2> resolution_{1, 1};
  std::vector<Point> coords_;
  std::vector<std::array<int, 3>> cells_;
  std::vector<double> measures_;
  std::array<std::vector<Facet>, 3> facets_;
  std::array<std::vector<int>, 3> tagged_nodes_;
  std::vector<std::optional<BoundaryTag>> node_tags_;
  std::vector<int> free_nodes_;
  std::vector<int> free_index_;
  std::vector<double> contact_weights_;
};

/// Builds a structured mesh. Rectangles are split into two triangles per cell
/// along the diagonal from the lower-left to the upper-right corner.
/// Throws InvalidInput when Gamma1 is empty or a side is untagged.
Mesh build_mesh(const MeshSpec& spec);

/// Restriction of a full nodal array to the free nodes.
Vector restrict_to_free(const Mesh& mesh, const Vector& full);
/// Extension by zero on Gamma1.
Vector extend_from_free(const Mesh& mesh, const Vector& free);

}  // namespace antiplane
