#include "sfem/smoothing.hpp"

#include <cmath>
#include <string>

#include "sfem/error.hpp"
#include "sfem/quadrature.hpp"

namespace sfem {

namespace {

Vec3 mean(const std::vector<Vec3>& xs) {
  Vec3 c = Vec3::Zero();
  for (const auto& x : xs) c += x;
  return c / static_cast<double>(xs.size());
}

SmoothingFacet segment_facet(const Vec3& a, const Vec3& b, const Vec3& inside, bool boundary) {
  const Vec3 t = b - a;
  Vec3 n(t.y(), -t.x(), 0.0);
  n.normalize();
  if (n.dot(a - inside) < 0.0) n = -n;
  return {{a, b}, n, t.norm(), boundary};
}

SmoothingFacet triangle_facet(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& inside, bool boundary) {
  const Vec3 av = 0.5 * (b - a).cross(c - a);
  Vec3 n = av.normalized();
  if (n.dot(a - inside) < 0.0) n = -n;
  return {{a, b, c}, n, av.norm(), boundary};
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 u = b - a;
  const Vec3 v = c - a;
  return 0.5 * (u.x() * v.y() - u.y() * v.x());
}

double tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return std::abs((b - a).dot((c - a).cross(d - a))) / 6.0;
}


}  // namespace

std::vector<SmoothingCell> build_subcells(const Mesh& mesh, std::size_t e, SubcellScheme scheme) {
  const auto& el = mesh.element(e);
  const Vec3 c = element_centroid(mesh, e);
  const double diam = element_diameter(mesh, e);
  const double tiny = 1e-14 * std::pow(diam, mesh.dim());
  std::vector<SmoothingCell> cells;

  if (mesh.dim() == 2) {
    const auto xs = element_coords(mesh, e);
    const std::size_t n = xs.size();
    if (scheme == SubcellScheme::whole_element) {
      SmoothingCell cell{e, xs, {}, element_measure(mesh, e)};
      for (std::size_t i = 0; i < n; ++i) cell.facets.push_back(segment_facet(xs[i], xs[(i + 1) % n], c, true));
      cells.push_back(std::move(cell));
      return cells;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3& a = xs[i];
      const Vec3& b = xs[(i + 1) % n];
      SmoothingCell cell{e, {a, b, c}, {}, triangle_area(a, b, c)};
      if (!(cell.measure > tiny)) throw GeometryError("degenerate smoothing cell in element " + std::to_string(e + 1));
      cell.facets.push_back(segment_facet(a, b, c, true));
      cell.facets.push_back(segment_facet(b, c, a, false));
      cell.facets.push_back(segment_facet(c, a, b, false));
      cells.push_back(std::move(cell));
    }
    return cells;
  }

  if (scheme == SubcellScheme::whole_element) {
    SmoothingCell cell{e, element_coords(mesh, e), {}, element_measure(mesh, e)};
    for (const auto& face : el.faces) {
      std::vector<Vec3> loop;
      for (int v : face) loop.push_back(mesh.node(v));
      const Vec3 fc = mean(loop);
      for (std::size_t j = 0; j < loop.size(); ++j) {
        cell.facets.push_back(triangle_facet(loop[j], loop[(j + 1) % loop.size()], fc, c, true));
      }
    }
    cells.push_back(std::move(cell));
    return cells;
  }
  for (const auto& face : el.faces) {
    std::vector<Vec3> loop;
    for (int v : face) loop.push_back(mesh.node(v));
    const Vec3 fc = mean(loop);
    for (std::size_t j = 0; j < loop.size(); ++j) {
      const Vec3& a = loop[j];
      const Vec3& b = loop[(j + 1) % loop.size()];
      SmoothingCell cell{e, {a, b, fc, c}, {}, tet_volume(a, b, fc, c)};
      if (!(cell.measure > tiny)) throw GeometryError("degenerate smoothing cell in element " + std::to_string(e + 1));
      const Vec3 inside = 0.25 * (a + b + fc + c);
      cell.facets.push_back(triangle_facet(a, b, fc, inside, true));
      cell.facets.push_back(triangle_facet(a, b, c, inside, false));
      cell.facets.push_back(triangle_facet(b, fc, c, inside, false));
      cell.facets.push_back(triangle_facet(fc, a, c, inside, false));
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

Eigen::MatrixXd smoothed_shape_gradient(const SmoothingCell& cell, const ElementBasis& basis,
                                        const SmoothingQuadrature& quad) {
  const int dim = basis.dim();
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(n, dim);
  Vec3 closure = Vec3::Zero();
  double facet_total = 0.0;

  for (const auto& facet : cell.facets) {
    closure += facet.measure * facet.normal;
    facet_total += facet.measure;
    const Eigen::RowVectorXd nrow = facet.normal.head(dim).transpose();
    if (dim == 2) {
      const int points = facet.on_element_boundary ? quad.boundary_edge_points : quad.interior_edge_points;
      for (const auto& q : gauss_legendre(points)) {
        const Vec3 x = (1.0 - q.t) * facet.vertices[0] + q.t * facet.vertices[1];
        grad += (q.weight * facet.measure) * basis.values(x) * nrow;
      }
    } else {
      const auto& rule =
          quad.facet_triangle_degree == 2 ? triangle_three_point_rule() : triangle_rule(quad.facet_triangle_degree);
      for (const auto& q : rule) {
        const Vec3 x = q.bary[0] * facet.vertices[0] + q.bary[1] * facet.vertices[1] + q.bary[2] * facet.vertices[2];
        grad += (q.weight * facet.measure) * basis.values(x) * nrow;
      }
    }
  }
  if (closure.norm() > 1e-12 * facet_total) {
    throw GeometryError("smoothing cell boundary of element " + std::to_string(cell.element + 1) + " is not closed");
  }
  return grad / cell.measure;
}

Eigen::MatrixXd voigt_b(const Eigen::MatrixXd& g, int dim) {
  const Eigen::Index n = g.rows();
  if (dim == 2) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(3, 2 * n);
    for (Eigen::Index a = 0; a < n; ++a) {
      b(0, 2 * a) = g(a, 0);
      b(1, 2 * a + 1) = g(a, 1);
      b(2, 2 * a) = g(a, 1);
      b(2, 2 * a + 1) = g(a, 0);
    }
    return b;
  }
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(6, 3 * n);
  for (Eigen::Index a = 0; a < n; ++a) {
    b(0, 3 * a) = g(a, 0);
    b(1, 3 * a + 1) = g(a, 1);
    b(2, 3 * a + 2) = g(a, 2);
    b(3, 3 * a) = g(a, 1);
    b(3, 3 * a + 1) = g(a, 0);
    b(4, 3 * a + 1) = g(a, 2);
    b(4, 3 * a + 2) = g(a, 1);
    b(5, 3 * a) = g(a, 2);
    b(5, 3 * a + 2) = g(a, 0);
  }
  return b;
}

SmoothedB smoothed_B(const SmoothingCell& cell, const ElementBasis& basis, int dim, const SmoothingQuadrature& quad) {
  return {voigt_b(smoothed_shape_gradient(cell, basis, quad), dim), cell.measure};
}

}  // namespace sfem
