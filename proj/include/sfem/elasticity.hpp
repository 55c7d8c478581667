#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sfem/mesh.hpp"
#include "sfem/smoothing.hpp"

namespace sfem {

enum class StressState { plane_stress, plane_strain, solid };

struct Material {
  double E = 1.0;
  double nu = 0.3;
  StressState state = StressState::plane_stress;

  /// Throws InputError unless E > 0 and -1 < nu < 0.5.
  void check() const;
  bool operator==(const Material&) const = default;
};

/// Isotropic Voigt constitutive matrix (3x3 in 2D, 6x6 in 3D).
Eigen::MatrixXd d_matrix(const Material& material);

enum class Method { csfem, pfem };

std::string to_string(Method method);
Method parse_method(const std::string& text);

struct ElementStiffness {
  std::size_t element = 0;
  Eigen::MatrixXd matrix;
  /// Strain evaluation points used: one per smoothing cell for CSFEM,
  /// quadrature points for PFEM.
  std::size_t integration_points = 0;
};

/// PFEM sub-simplex rule degree used when none is given.
int default_pfem_degree(int dim);
/// Degree at which PFEM quadrature matches the dense-integration settings
/// used to contrast the two methods (>= 100 points per sub-simplex in 3D).
int reproduction_pfem_degree(int dim);

/// Smoothed stiffness: sum over cells of A_c * Bt^T D Bt.
ElementStiffness stiffness_csfem(const Mesh& mesh, std::size_t e, const Material& material,
                                 SubcellScheme scheme = SubcellScheme::maximal, const SmoothingQuadrature& quad = {});

/// Compatible stiffness integrated on the centroid sub-triangulation
/// (sub-tetrahedralisation in 3D) with rules of the given degree.
ElementStiffness stiffness_pfem(const Mesh& mesh, std::size_t e, const Material& material, int degree);

/// Centroid fan of an element: triangles (2D) or tetrahedra through face
/// centres (3D). Identical to the maximal smoothing-cell geometry.
struct SubSimplex {
  std::vector<Vec3> vertices;
  double measure = 0.0;
};
std::vector<SubSimplex> sub_simplices(const Mesh& mesh, std::size_t e);

/// Point in a sub-simplex from barycentric coordinates.
Vec3 simplex_point(const SubSimplex& s, const std::array<double, 4>& bary);

using VectorField = std::function<Vec3(const Vec3&)>;

Eigen::VectorXd body_force_vector(const Mesh& mesh, std::size_t e, const VectorField& b, int degree);

/// Consistent load of a traction on boundary facet `facet` of element e.
/// Throws InputError when the facet is interior to the mesh.
Eigen::VectorXd traction_vector(const Mesh& mesh, std::size_t e, int facet, const VectorField& t, int degree = 5);

}  // namespace sfem
