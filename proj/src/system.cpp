#include "sfem/system.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include <Eigen/SparseCholesky>

#include "parallel.hpp"
#include "sfem/error.hpp"
#include "sfem/quadrature.hpp"
#include "sfem/wachspress.hpp"

namespace sfem {

namespace {

struct ElementContribution {
  Eigen::MatrixXd k;
  Eigen::VectorXd f;
  std::size_t points = 0;
};

ElementContribution element_contribution(const Problem& p, std::size_t e,
                                         const std::map<std::size_t, std::vector<const TractionLoad*>>& tractions) {
  const auto& mat = p.materials[e];
  ElementStiffness ke = p.method == Method::csfem
                            ? stiffness_csfem(p.mesh, e, mat, p.options.scheme, p.options.smoothing)
                            : stiffness_pfem(p.mesh, e, mat, p.pfem_degree());
  ElementContribution out{std::move(ke.matrix), Eigen::VectorXd::Zero(0), ke.integration_points};
  out.f = Eigen::VectorXd::Zero(out.k.rows());
  if (p.loads.body_force) out.f += body_force_vector(p.mesh, e, p.loads.body_force, p.load_degree());
  if (auto it = tractions.find(e); it != tractions.end()) {
    for (const auto* t : it->second) out.f += traction_vector(p.mesh, e, t->facet, t->traction);
  }
  return out;
}

void check_problem(const Problem& p) {
  if (p.materials.size() != p.mesh.element_count()) {
    throw InputError("problem has " + std::to_string(p.materials.size()) + " materials for " +
                     std::to_string(p.mesh.element_count()) + " elements");
  }
  for (const auto& m : p.materials) m.check();
  for (const auto& t : p.loads.tractions) {
    if (t.element >= p.mesh.element_count()) throw InputError("traction on unknown element " + std::to_string(t.element + 1));
    if (!t.traction) throw InputError("traction load without a traction field");
  }
}

}  // namespace

GlobalSystem assemble(const Problem& problem, Execution exec) {
  check_problem(problem);
  const auto& mesh = problem.mesh;
  const int dim = mesh.dim();
  const std::size_t ne = mesh.element_count();

  std::map<std::size_t, std::vector<const TractionLoad*>> by_element;
  for (const auto& t : problem.loads.tractions) by_element[t.element].push_back(&t);

  std::vector<ElementContribution> parts(ne);
  detail::for_each_index(ne, exec, [&](std::size_t e) { parts[e] = element_contribution(problem, e, by_element); });

  GlobalSystem sys;
  sys.dim = dim;
  sys.node_count = mesh.node_count();
  const auto ndof = static_cast<Eigen::Index>(dim * mesh.node_count());
  sys.f = Eigen::VectorXd::Zero(ndof);
  std::vector<Eigen::Triplet<double>> triplets;
  std::size_t nnz = 0;
  for (const auto& part : parts) nnz += static_cast<std::size_t>(part.k.size());
  triplets.reserve(nnz);
  for (std::size_t e = 0; e < ne; ++e) {
    const auto& verts = mesh.element(e).vertices;
    const auto& part = parts[e];
    std::vector<Eigen::Index> map;
    map.reserve(verts.size() * dim);
    for (int v : verts) {
      for (int i = 0; i < dim; ++i) map.push_back(sys.dof(v, i));
    }
    for (std::size_t a = 0; a < map.size(); ++a) {
      sys.f[map[a]] += part.f[static_cast<Eigen::Index>(a)];
      for (std::size_t b = 0; b < map.size(); ++b) {
        triplets.emplace_back(map[a], map[b], part.k(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
      }
    }
    sys.integration_points += part.points;
  }
  sys.K.resize(ndof, ndof);
  sys.K.setFromTriplets(triplets.begin(), triplets.end());
  sys.K.makeCompressed();
  return sys;
}

ConstrainedSystem apply_dirichlet(const GlobalSystem& system, const std::vector<DirichletCondition>& constraints) {
  const Eigen::Index n = system.ndof();
  ConstrainedSystem out;
  out.constrained.assign(static_cast<std::size_t>(n), 0);
  out.prescribed = Eigen::VectorXd::Zero(n);
  for (const auto& c : constraints) {
    if (c.node < 0 || static_cast<std::size_t>(c.node) >= system.node_count || c.component < 0 ||
        c.component >= system.dim) {
      throw InputError("boundary condition on node " + std::to_string(c.node + 1) + ", component " +
                       std::to_string(c.component + 1) + " is out of range");
    }
    if (!std::isfinite(c.value)) throw InputError("non-finite prescribed displacement");
    const Eigen::Index d = system.dof(c.node, c.component);
    auto& flag = out.constrained[static_cast<std::size_t>(d)];
    if (flag) {
      const double prev = out.prescribed[d];
      if (std::abs(prev - c.value) > 1e-12 * std::max({1.0, std::abs(prev), std::abs(c.value)})) {
        throw InputError("conflicting boundary values on node " + std::to_string(c.node + 1) + ", component " +
                         std::to_string(c.component + 1));
      }
      continue;
    }
    flag = 1;
    out.prescribed[d] = c.value;
  }

  out.f = system.f;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(system.K.nonZeros()));
  for (Eigen::Index j = 0; j < system.K.outerSize(); ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(system.K, j); it; ++it) {
      const Eigen::Index i = it.row();
      const bool ci = out.constrained[static_cast<std::size_t>(i)];
      const bool cj = out.constrained[static_cast<std::size_t>(j)];
      if (!ci && !cj) {
        triplets.emplace_back(i, j, it.value());
      } else if (!ci && cj) {
        out.f[i] -= it.value() * out.prescribed[j];
      }
    }
  }
  for (Eigen::Index d = 0; d < n; ++d) {
    if (out.constrained[static_cast<std::size_t>(d)]) {
      triplets.emplace_back(d, d, 1.0);
      out.f[d] = out.prescribed[d];
    }
  }
  out.K.resize(n, n);
  out.K.setFromTriplets(triplets.begin(), triplets.end());
  out.K.makeCompressed();
  return out;
}

namespace {

double relative_residual(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& f, const Eigen::VectorXd& u) {
  const double fn = f.norm();
  const double r = (K * u - f).norm();
  return fn > 0.0 ? r / fn : r;
}

}  // namespace

SolveReport solve_pcg(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& f, double tolerance,
                      int max_iterations) {
  SolveReport rep;
  rep.solver = "pcg";
  const Eigen::Index n = f.size();
  Eigen::VectorXd inv_diag(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = K.coeff(i, i);
    inv_diag[i] = d > 0.0 ? 1.0 / d : 1.0;
  }
  rep.u = Eigen::VectorXd::Zero(n);
  const double fn = f.norm();
  if (fn == 0.0) {
    rep.residual_history.push_back(0.0);
    return rep;
  }
  Eigen::VectorXd r = f;
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  rep.residual_history.push_back(1.0);
  for (int it = 0; it < max_iterations; ++it) {
    const Eigen::VectorXd kp = K * p;
    const double pkp = p.dot(kp);
    if (!(pkp > 0.0)) break;  // not positive definite along p
    const double alpha = rz / pkp;
    rep.u += alpha * p;
    r -= alpha * kp;
    rep.iterations = it + 1;
    const double rel = r.norm() / fn;
    rep.residual_history.push_back(rel);
    if (rel < tolerance) break;
    z = inv_diag.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  rep.relative_residual = relative_residual(K, f, rep.u);
  return rep;
}

SolveReport solve(const ConstrainedSystem& system, const SolverOptions& options) {
  const auto& K = system.K;
  const auto& f = system.f;
  const int max_it = std::max<int>(1, options.max_iteration_factor * static_cast<int>(f.size()));
  std::vector<double> history;

  if (options.kind != SolverOptions::Kind::cg) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
    if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all()) {
      SolveReport rep;
      rep.solver = "ldlt";
      rep.u = ldlt.solve(f);
      rep.relative_residual = relative_residual(K, f, rep.u);
      rep.residual_history.push_back(rep.relative_residual);
      if (ldlt.info() == Eigen::Success && std::isfinite(rep.relative_residual) &&
          rep.relative_residual < options.residual_tolerance) {
        return rep;
      }
      history = rep.residual_history;
    }
    if (options.kind == SolverOptions::Kind::direct) {
      throw SolverError("direct solver failed: stiffness matrix is singular or indefinite", history);
    }
  }
  auto rep = solve_pcg(K, f, options.cg_tolerance, max_it);
  history.insert(history.end(), rep.residual_history.begin(), rep.residual_history.end());
  rep.residual_history = history;
  if (!std::isfinite(rep.relative_residual) || rep.relative_residual >= options.residual_tolerance) {
    throw SolverError("linear solve did not converge: relative residual " + std::to_string(rep.relative_residual),
                      rep.residual_history);
  }
  return rep;
}

Eigen::VectorXd reactions(const GlobalSystem& system, const Eigen::VectorXd& u) { return system.K * u - system.f; }

Eigen::VectorXd element_dofs(const Mesh& mesh, std::size_t e, const Eigen::VectorXd& u) {
  const int dim = mesh.dim();
  const auto& verts = mesh.element(e).vertices;
  Eigen::VectorXd ue(static_cast<Eigen::Index>(verts.size() * dim));
  for (std::size_t a = 0; a < verts.size(); ++a) {
    for (int i = 0; i < dim; ++i) ue[static_cast<Eigen::Index>(a * dim + i)] = u[dim * verts[a] + i];
  }
  return ue;
}

namespace {

struct ElementFields {
  std::vector<CellField> cells;
  std::vector<StrainSample> samples;
};

const SimplexRule& simplex_rule(int dim, int degree) { return dim == 2 ? triangle_rule(degree) : tetrahedron_rule(degree); }

ElementFields element_fields(const Problem& p, std::size_t e, const Eigen::VectorXd& u, int sample_degree) {
  const auto& mesh = p.mesh;
  const int dim = mesh.dim();
  const auto basis = ElementBasis::from_mesh(mesh, e);
  const auto d = d_matrix(p.materials[e]);
  const Eigen::VectorXd ue = element_dofs(mesh, e, u);
  ElementFields out;

  if (p.method == Method::csfem) {
    const auto& rule = simplex_rule(dim, 3);
    const auto subs = p.options.scheme == SubcellScheme::whole_element ? sub_simplices(mesh, e) : std::vector<SubSimplex>{};
    for (const auto& cell : build_subcells(mesh, e, p.options.scheme)) {
      const auto bt = smoothed_B(cell, basis, dim, p.options.smoothing);
      Eigen::VectorXd strain = bt.matrix * ue;
      const auto add_samples = [&](const SubSimplex& s) {
        for (const auto& q : rule) out.samples.push_back({e, simplex_point(s, q.bary), q.weight * s.measure, strain});
      };
      if (p.options.scheme == SubcellScheme::whole_element) {
        for (const auto& s : subs) add_samples(s);
      } else {
        add_samples({cell.vertices, cell.measure});
      }
      out.cells.push_back({e, cell.vertices, cell.measure, strain, d * strain});
    }
    return out;
  }

  const auto& rule = simplex_rule(dim, sample_degree);
  for (const auto& s : sub_simplices(mesh, e)) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d.rows());
    for (const auto& q : rule) {
      const Vec3 x = simplex_point(s, q.bary);
      const Eigen::VectorXd strain = voigt_b(basis.evaluate_with_gradients(x).gradients, dim) * ue;
      mean += q.weight * strain;
      out.samples.push_back({e, x, q.weight * s.measure, strain});
    }
    out.cells.push_back({e, s.vertices, s.measure, mean, d * mean});
  }
  return out;
}

}  // namespace

SolutionField recover_fields(const Problem& problem, const Eigen::VectorXd& u, int pfem_sample_degree, Execution exec) {
  check_problem(problem);
  const auto expected = static_cast<Eigen::Index>(problem.mesh.dim() * problem.mesh.node_count());
  if (u.size() != expected) throw InputError("displacement vector has the wrong length");
  const std::size_t ne = problem.mesh.element_count();
  std::vector<ElementFields> parts(ne);
  detail::for_each_index(ne, exec, [&](std::size_t e) { parts[e] = element_fields(problem, e, u, pfem_sample_degree); });
  SolutionField field;
  field.u = u;
  for (auto& part : parts) {
    for (auto& c : part.cells) field.cells.push_back(std::move(c));
    for (auto& s : part.samples) field.samples.push_back(std::move(s));
  }
  return field;
}

}  // namespace sfem
