#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sfem/elasticity.hpp"
#include "sfem/mesh.hpp"

namespace sfem {

/// Ids below are the 1-based labels used in the deck.
struct InpNode {
  int id = 0;
  Vec3 x = Vec3::Zero();
  bool operator==(const InpNode&) const = default;
};

struct InpElement {
  int id = 0;
  std::vector<int> nodes;
  std::vector<std::vector<int>> faces;  // node ids per face, 3D only
  bool operator==(const InpElement&) const = default;
};

/// A `*User element` block: all members have `node_count` nodes and share
/// one ELSET and one (E, nu) pair.
struct ElementGroup {
  int node_count = 0;
  std::string elset;
  std::vector<InpElement> elements;
  double E = 0.0;
  double nu = 0.0;

  std::string label() const { return "U" + std::to_string(node_count); }
  bool operator==(const ElementGroup&) const = default;
};

struct InpBoundary {
  int node = 0;
  int dof = 1;  // 1-based component
  double value = 0.0;
  bool operator==(const InpBoundary&) const = default;
};

/// Constant traction on facet `facet` (1-based) of element `element`.
struct InpTraction {
  int element = 0;
  int facet = 1;
  Vec3 t = Vec3::Zero();
  bool operator==(const InpTraction&) const = default;
};

struct Model {
  int dim = 2;
  std::vector<InpNode> nodes;
  std::vector<ElementGroup> groups;
  std::vector<InpBoundary> boundary;
  std::vector<InpTraction> tractions;
  std::optional<Vec3> body_force;  // constant body force
  Method method = Method::csfem;
  StressState plane = StressState::plane_stress;  // 2D only
  /// Non-fatal diagnostics from parsing; not part of model equality.
  std::vector<std::string> warnings;

  /// Structural equality: everything except warnings; groups compared by label.
  bool operator==(const Model& other) const;
};

/// Throws ParseError (with 1-based line number) on malformed input.
Model parse_inp(const std::string& text);
std::string write_inp(const Model& model);

/// Groups the elements of `mesh` by node count, one material for all.
Model make_model(const Mesh& mesh, double E, double nu, Method method = Method::csfem,
                 StressState plane = StressState::plane_stress);

/// Mesh with nodes in deck order and elements ordered by id. Throws
/// InputError when an element references an undefined node.
Mesh to_mesh(const Model& model);

/// Per-element materials aligned with to_mesh's element order.
std::vector<Material> element_materials(const Model& model);

/// Element ids in to_mesh order; used to map deck ids to mesh indices.
std::vector<int> element_ids(const Model& model);

}  // namespace sfem
