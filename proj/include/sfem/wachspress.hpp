#pragma once

#include <array>
#include <cstddef>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "sfem/mesh.hpp"

namespace sfem {

/// Shape function values (length n) and, when requested, gradients (n x d).
struct BasisEval {
  Eigen::VectorXd values;
  Eigen::MatrixXd gradients;
};

/// Wachspress coordinates on a convex polygon with counterclockwise vertices.
///
/// Interior points use w_v = det(n_prev, n_next) / (h_prev h_next), with
/// h_e(x) = (v - x) . n_e the distance to edge e. Points within
/// 1e-12 * diameter of an edge are treated as on that edge, where the
/// coordinates reduce to linear interpolation between its endpoints.
class Wachspress2d {
public:
  explicit Wachspress2d(std::vector<Eigen::Vector2d> vertices);

  std::size_t size() const noexcept { return vertices_.size(); }
  double diameter() const noexcept { return diameter_; }
  const std::vector<Eigen::Vector2d>& vertices() const noexcept { return vertices_; }

  /// Throws GeometryError when x lies outside the polygon.
  Eigen::VectorXd values(const Eigen::Vector2d& x) const;
  /// Gradients need x strictly inside; throws GeometryError on the boundary.
  BasisEval evaluate_with_gradients(const Eigen::Vector2d& x) const;

private:
  std::vector<double> distances(const Eigen::Vector2d& x) const;

  std::vector<Eigen::Vector2d> vertices_;
  std::vector<Eigen::Vector2d> normals_;  // outward unit normal of edge (i, i+1)
  std::vector<double> corner_det_;        // det(n_{i-1}, n_i)
  double diameter_ = 0.0;
};

/// Wachspress coordinates on a simple convex polyhedron (every vertex has
/// exactly three incident faces). `faces` hold local vertex indices, each loop
/// counterclockwise seen from outside. Boundary points are evaluated with the
/// 2D coordinates of the containing face.
class Wachspress3d {
public:
  Wachspress3d(std::vector<Vec3> vertices, std::vector<std::vector<int>> faces);

  std::size_t size() const noexcept { return vertices_.size(); }
  double diameter() const noexcept { return diameter_; }

  Eigen::VectorXd values(const Vec3& x) const;
  BasisEval evaluate_with_gradients(const Vec3& x) const;

private:
  struct FaceFrame {
    Vec3 origin;
    Vec3 e1;
    Vec3 e2;
  };

  std::vector<double> distances(const Vec3& x) const;

  std::vector<Vec3> vertices_;
  std::vector<std::vector<int>> faces_;
  std::vector<Vec3> normals_;
  std::vector<Vec3> face_points_;
  std::vector<std::array<int, 3>> incident_;
  std::vector<double> corner_det_;
  std::vector<FaceFrame> frames_;
  std::vector<Wachspress2d> face_bases_;
  double diameter_ = 0.0;
};

/// Runtime-dimension wrapper used by the element kernels. Points are passed
/// as 3-vectors (z ignored in 2D); gradients are n x dim.
class ElementBasis {
public:
  static ElementBasis from_mesh(const Mesh& mesh, std::size_t e);

  int dim() const noexcept { return dim_; }
  std::size_t size() const;
  double diameter() const;

  Eigen::VectorXd values(const Vec3& x) const;
  BasisEval evaluate_with_gradients(const Vec3& x) const;

private:
  int dim_ = 2;
  std::variant<Wachspress2d, Wachspress3d> impl_;

  ElementBasis(int dim, std::variant<Wachspress2d, Wachspress3d> impl) : dim_(dim), impl_(std::move(impl)) {}
};

BasisEval shape_2d(const std::vector<Eigen::Vector2d>& polygon, const Eigen::Vector2d& x);
BasisEval shape_3d(const std::vector<Vec3>& vertices, const std::vector<std::vector<int>>& faces, const Vec3& x);
BasisEval grad_shape(const ElementBasis& basis, const Vec3& x);

}  // namespace sfem
