#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "sfem/mesh.hpp"
#include "sfem/wachspress.hpp"

namespace sfem {

/// `maximal` splits an element into simplices around its geometric centre.
/// `whole_element` uses the element itself as the only smoothing cell; it
/// exists for kernel-equivalence tests.
enum class SubcellScheme { maximal, whole_element };

struct SmoothingFacet {
  std::vector<Vec3> vertices;  // segment (2D) or triangle (3D)
  Vec3 normal;                 // unit, outward from the cell
  double measure = 0.0;
  bool on_element_boundary = false;
};

/// Cell over which the smoothed strain is constant.
struct SmoothingCell {
  std::size_t element = 0;
  std::vector<Vec3> vertices;
  std::vector<SmoothingFacet> facets;
  double measure = 0.0;
};

/// Boundary quadrature for the smoothed gradients. 2D edges use Gauss-Legendre
/// with the given point counts; 3D facet triangles use the symmetric 3-point
/// rule at degree 2 and conical-product rules above that.
struct SmoothingQuadrature {
  int boundary_edge_points = 2;
  int interior_edge_points = 1;
  int facet_triangle_degree = 2;
};

std::vector<SmoothingCell> build_subcells(const Mesh& mesh, std::size_t e,
                                          SubcellScheme scheme = SubcellScheme::maximal);

/// n x d matrix of boundary-averaged shape function derivatives,
/// (1 / A_c) * integral over the cell boundary of phi_a n_i.
Eigen::MatrixXd smoothed_shape_gradient(const SmoothingCell& cell, const ElementBasis& basis,
                                        const SmoothingQuadrature& quad = {});

/// Strain-displacement matrix in Voigt order: (xx, yy, xy) in 2D and
/// (xx, yy, zz, xy, yz, zx) in 3D with engineering shear strains.
Eigen::MatrixXd voigt_b(const Eigen::MatrixXd& gradients, int dim);

struct SmoothedB {
  Eigen::MatrixXd matrix;
  double cell_measure = 0.0;
};

SmoothedB smoothed_B(const SmoothingCell& cell, const ElementBasis& basis, int dim,
                     const SmoothingQuadrature& quad = {});

}  // namespace sfem
