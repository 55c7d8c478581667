#include "sfem/elasticity.hpp"

#include <algorithm>
#include <cmath>

#include "sfem/error.hpp"
#include "sfem/quadrature.hpp"
#include "sfem/wachspress.hpp"

namespace sfem {

void Material::check() const {
  if (!(E > 0.0)) throw InputError("Young's modulus must be positive");
  if (!(nu > -1.0 && nu < 0.5)) throw InputError("Poisson's ratio must lie in (-1, 0.5)");
}

Eigen::MatrixXd d_matrix(const Material& m) {
  m.check();
  const double E = m.E;
  const double nu = m.nu;
  switch (m.state) {
    case StressState::plane_stress: {
      Eigen::MatrixXd d(3, 3);
      d << 1.0, nu, 0.0, nu, 1.0, 0.0, 0.0, 0.0, 0.5 * (1.0 - nu);
      return d * (E / (1.0 - nu * nu));
    }
    case StressState::plane_strain: {
      Eigen::MatrixXd d(3, 3);
      d << 1.0 - nu, nu, 0.0, nu, 1.0 - nu, 0.0, 0.0, 0.0, 0.5 - nu;
      return d * (E / ((1.0 + nu) * (1.0 - 2.0 * nu)));
    }
    case StressState::solid: {
      const double lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
      const double mu = E / (2.0 * (1.0 + nu));
      Eigen::MatrixXd d = Eigen::MatrixXd::Zero(6, 6);
      d.topLeftCorner(3, 3).setConstant(lambda);
      for (int i = 0; i < 3; ++i) d(i, i) += 2.0 * mu;
      for (int i = 3; i < 6; ++i) d(i, i) = mu;
      return d;
    }
  }
  return {};
}

std::string to_string(Method method) { return method == Method::csfem ? "csfem" : "pfem"; }

Method parse_method(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "csfem") return Method::csfem;
  if (t == "pfem") return Method::pfem;
  throw InputError("unknown method '" + text + "' (expected csfem or pfem)");
}

int default_pfem_degree(int dim) { return dim == 2 ? 8 : 6; }
int reproduction_pfem_degree(int dim) { return dim == 2 ? 8 : 6; }

ElementStiffness stiffness_csfem(const Mesh& mesh, std::size_t e, const Material& material, SubcellScheme scheme,
                                 const SmoothingQuadrature& quad) {
  const int dim = mesh.dim();
  const auto basis = ElementBasis::from_mesh(mesh, e);
  const auto d = d_matrix(material);
  const auto ndof = static_cast<Eigen::Index>(dim * basis.size());
  ElementStiffness k{e, Eigen::MatrixXd::Zero(ndof, ndof), 0};
  for (const auto& cell : build_subcells(mesh, e, scheme)) {
    const auto bt = smoothed_B(cell, basis, dim, quad);
    k.matrix.noalias() += bt.cell_measure * (bt.matrix.transpose() * (d * bt.matrix));
    ++k.integration_points;
  }
  k.matrix = 0.5 * (k.matrix + k.matrix.transpose()).eval();
  return k;
}

std::vector<SubSimplex> sub_simplices(const Mesh& mesh, std::size_t e) {
  std::vector<SubSimplex> out;
  for (const auto& cell : build_subcells(mesh, e, SubcellScheme::maximal)) out.push_back({cell.vertices, cell.measure});
  return out;
}

Vec3 simplex_point(const SubSimplex& s, const std::array<double, 4>& bary) {
  Vec3 x = Vec3::Zero();
  for (std::size_t i = 0; i < s.vertices.size(); ++i) x += bary[i] * s.vertices[i];
  return x;
}

namespace {

const SimplexRule& volume_rule(int dim, int degree) { return dim == 2 ? triangle_rule(degree) : tetrahedron_rule(degree); }

// Gradients at x; a point found on the boundary is moved 1e-12 * diameter
// toward the element centre.
BasisEval gradients_nudged(const ElementBasis& basis, const Vec3& x, const Vec3& centre) {
  try {
    return basis.evaluate_with_gradients(x);
  } catch (const GeometryError&) {
    const Vec3 dir = (centre - x).normalized();
    return basis.evaluate_with_gradients(x + 1e-12 * basis.diameter() * dir);
  }
}

}  // namespace

ElementStiffness stiffness_pfem(const Mesh& mesh, std::size_t e, const Material& material, int degree) {
  const int dim = mesh.dim();
  const auto basis = ElementBasis::from_mesh(mesh, e);
  const auto d = d_matrix(material);
  const Vec3 centre = element_centroid(mesh, e);
  const auto ndof = static_cast<Eigen::Index>(dim * basis.size());
  ElementStiffness k{e, Eigen::MatrixXd::Zero(ndof, ndof), 0};
  const auto& rule = volume_rule(dim, degree);
  for (const auto& s : sub_simplices(mesh, e)) {
    for (const auto& q : rule) {
      const auto eval = gradients_nudged(basis, simplex_point(s, q.bary), centre);
      const Eigen::MatrixXd b = voigt_b(eval.gradients, dim);
      k.matrix.noalias() += (q.weight * s.measure) * (b.transpose() * (d * b));
      ++k.integration_points;
    }
  }
  k.matrix = 0.5 * (k.matrix + k.matrix.transpose()).eval();
  return k;
}

Eigen::VectorXd body_force_vector(const Mesh& mesh, std::size_t e, const VectorField& b, int degree) {
  const int dim = mesh.dim();
  const auto basis = ElementBasis::from_mesh(mesh, e);
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::VectorXd f = Eigen::VectorXd::Zero(dim * n);
  const auto& rule = volume_rule(dim, degree);
  for (const auto& s : sub_simplices(mesh, e)) {
    for (const auto& q : rule) {
      const Vec3 x = simplex_point(s, q.bary);
      const Eigen::VectorXd phi = basis.values(x);
      const Vec3 bx = b(x);
      const double w = q.weight * s.measure;
      for (Eigen::Index a = 0; a < n; ++a) {
        for (int i = 0; i < dim; ++i) f[dim * a + i] += w * phi[a] * bx[i];
      }
    }
  }
  return f;
}

Eigen::VectorXd traction_vector(const Mesh& mesh, std::size_t e, int facet, const VectorField& t, int degree) {
  if (facet < 0 || facet >= mesh.facet_count(e)) {
    throw InputError("element " + std::to_string(e + 1) + " has no facet " + std::to_string(facet + 1));
  }
  if (!mesh.is_boundary_facet(e, facet)) {
    throw InputError("traction on interior facet " + std::to_string(facet + 1) + " of element " + std::to_string(e + 1));
  }
  const int dim = mesh.dim();
  const auto basis = ElementBasis::from_mesh(mesh, e);
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::VectorXd f = Eigen::VectorXd::Zero(dim * n);
  auto accumulate = [&](const Vec3& x, double w) {
    const Eigen::VectorXd phi = basis.values(x);
    const Vec3 tx = t(x);
    for (Eigen::Index a = 0; a < n; ++a) {
      for (int i = 0; i < dim; ++i) f[dim * a + i] += w * phi[a] * tx[i];
    }
  };

  const auto ids = mesh.facet_nodes(e, facet);
  if (dim == 2) {
    const Vec3& p = mesh.node(ids[0]);
    const Vec3& q = mesh.node(ids[1]);
    const double len = (q - p).norm();
    for (const auto& g : gauss_legendre(std::max(1, (degree + 2) / 2))) accumulate((1.0 - g.t) * p + g.t * q, g.weight * len);
    return f;
  }
  std::vector<Vec3> loop;
  for (int v : ids) loop.push_back(mesh.node(v));
  Vec3 fc = Vec3::Zero();
  for (const auto& x : loop) fc += x;
  fc /= static_cast<double>(loop.size());
  for (std::size_t j = 0; j < loop.size(); ++j) {
    const Vec3& a = loop[j];
    const Vec3& b = loop[(j + 1) % loop.size()];
    const double area = 0.5 * (b - a).cross(fc - a).norm();
    for (const auto& q : triangle_rule(degree)) accumulate(q.bary[0] * a + q.bary[1] * b + q.bary[2] * fc, q.weight * area);
  }
  return f;
}

}  // namespace sfem
