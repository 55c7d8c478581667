#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sfem {

using Vec3 = Eigen::Vector3d;

/// A convex polytope element. Node indices are 0-based into Mesh::nodes().
///
/// In 2D `vertices` is a counterclockwise loop and facet i is the edge
/// (vertices[i], vertices[i+1]). In 3D `faces` holds one vertex loop per face,
/// counterclockwise when seen from outside the element.
struct PolyElement {
  std::vector<int> vertices;
  std::vector<std::vector<int>> faces;

  std::size_t node_count() const noexcept { return vertices.size(); }
  bool operator==(const PolyElement&) const = default;
};

struct FacetRef {
  std::size_t element;
  int facet;
  bool operator==(const FacetRef&) const = default;
};

/// Polygonal (dim 2) or polyhedral (dim 3) mesh. Coordinates are stored as
/// 3-vectors; the z component is zero for 2D meshes. Immutable once built.
class Mesh {
public:
  Mesh() = default;
  Mesh(int dim, std::vector<Vec3> nodes, std::vector<PolyElement> elements);

  int dim() const noexcept { return dim_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t element_count() const noexcept { return elements_.size(); }

  const Vec3& node(std::size_t i) const { return nodes_[i]; }
  const std::vector<Vec3>& nodes() const noexcept { return nodes_; }
  const PolyElement& element(std::size_t e) const { return elements_[e]; }
  const std::vector<PolyElement>& elements() const noexcept { return elements_; }

  int facet_count(std::size_t e) const;
  /// Node loop of a facet: the two edge endpoints in 2D, the face loop in 3D.
  std::vector<int> facet_nodes(std::size_t e, int facet) const;

  bool is_boundary_facet(std::size_t e, int facet) const;
  const std::vector<FacetRef>& boundary_facets() const noexcept { return boundary_; }
  /// Sorted, unique indices of nodes lying on a boundary facet.
  std::vector<int> boundary_nodes() const;

  bool operator==(const Mesh& other) const {
    return dim_ == other.dim_ && nodes_ == other.nodes_ && elements_ == other.elements_;
  }

private:
  void index_facets();

  int dim_ = 2;
  std::vector<Vec3> nodes_;
  std::vector<PolyElement> elements_;
  std::vector<std::vector<char>> on_boundary_;
  std::vector<FacetRef> boundary_;
};

std::vector<Vec3> element_coords(const Mesh& mesh, std::size_t e);

/// Area (2D, shoelace) or volume (3D, centroid-to-face tetrahedra). Throws
/// GeometryError for non-positive measure.
double element_measure(const Mesh& mesh, std::size_t e);

/// Geometric centre: arithmetic mean of the vertex coordinates (not the
/// area/volume centroid).
Vec3 element_centroid(const Mesh& mesh, std::size_t e);

double element_diameter(const Mesh& mesh, std::size_t e);
double mesh_measure(const Mesh& mesh);

/// Newell normal of a planar loop, scaled to the loop's area.
Vec3 area_vector(const std::vector<Vec3>& loop);

enum class ViolationKind { dangling_node, orientation, convexity, degenerate, planarity, manifold, duplicate };

struct Violation {
  ViolationKind kind;
  std::size_t element;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool has(ViolationKind kind) const;
  std::string summary() const;
};

ValidationReport validate_mesh(const Mesh& mesh);

}  // namespace sfem
