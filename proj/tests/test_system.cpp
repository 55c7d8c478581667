#include <doctest.h>

#include <algorithm>
#include <random>

#include <Eigen/Eigenvalues>

#include "sfem/benchmarks.hpp"
#include "sfem/error.hpp"
#include "sfem/mesh_gen.hpp"
#include "sfem/system.hpp"
#include "sfem/vtk.hpp"
#include "support.hpp"

using namespace sfem;

namespace {

Problem bare_problem(const Mesh& mesh, Method method = Method::csfem, Material mat = {1.0, 0.3, StressState::plane_stress}) {
  if (mesh.dim() == 3) mat.state = StressState::solid;
  Problem p;
  p.mesh = mesh;
  p.materials.assign(mesh.element_count(), mat);
  p.method = method;
  return p;
}

int zero_eigenvalues(const Eigen::MatrixXd& k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
  const double tol = 1e-10 * es.eigenvalues().cwiseAbs().maxCoeff();
  return static_cast<int>((es.eigenvalues().array().abs() <= tol).count());
}

// Prescribes an affine field on every boundary node.
Problem affine_patch(const Mesh& mesh, Method method, const AnalyticalSolution& exact) {
  auto p = bare_problem(mesh, method, exact.material);
  for (int n : mesh.boundary_nodes()) {
    const Vec3 u = exact.displacement(mesh.node(n));
    for (int i = 0; i < mesh.dim(); ++i) p.loads.dirichlet.push_back({n, i, u[i]});
  }
  return p;
}

Eigen::VectorXd nodal(const Mesh& mesh, const std::function<Vec3(const Vec3&)>& f) {
  Eigen::VectorXd u(mesh.dim() * static_cast<Eigen::Index>(mesh.node_count()));
  for (std::size_t n = 0; n < mesh.node_count(); ++n) u.segment(mesh.dim() * n, mesh.dim()) = f(mesh.node(n)).head(mesh.dim());
  return u;
}

}  // namespace

TEST_CASE("global stiffness of two triangles") {
  const auto sys = assemble(bare_problem(testing::two_triangles()));
  CHECK(sys.K.rows() == 8);
  CHECK(sys.ndof() == 8);
  const Eigen::MatrixXd k(sys.K);
  CHECK((k - k.transpose()).norm() < 1e-14);
  CHECK(zero_eigenvalues(k) == 3);
}

TEST_CASE("a one-element mesh assembles to its element stiffness") {
  std::mt19937_64 rng(3);
  const auto m = testing::single_polygon(testing::random_convex_polygon(rng, 6));
  for (auto method : {Method::csfem, Method::pfem}) {
    const auto p = bare_problem(m, method);
    const auto ke = method == Method::csfem ? stiffness_csfem(m, 0, p.materials[0]) : stiffness_pfem(m, 0, p.materials[0], 8);
    CHECK((Eigen::MatrixXd(assemble(p).K) - ke.matrix).norm() < 1e-13 * ke.matrix.norm());
  }
}

TEST_CASE("disconnected elements carry independent rigid modes") {
  const Mesh m(2, {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(2, 0, 0), Vec3(3, 0, 0), Vec3(2, 1, 0)},
               {{{0, 1, 2}, {}}, {{3, 4, 5}, {}}});
  CHECK(zero_eigenvalues(Eigen::MatrixXd(assemble(bare_problem(m)).K)) == 6);
}

TEST_CASE("serial and parallel assembly agree") {
  const auto mesh = voronoi_mesh(DomainGeometry::rectangle(2.0, 1.0), 60, 5, 7);
  for (auto method : {Method::csfem, Method::pfem}) {
    auto p = bare_problem(mesh, method);
    p.loads.body_force = [](const Vec3& x) { return Vec3(x.y(), 1.0, 0.0); };
    const auto a = assemble(p, Execution::serial);
    const auto b = assemble(p, Execution::parallel);
    CHECK((Eigen::MatrixXd(a.K) - Eigen::MatrixXd(b.K)).norm() == 0.0);
    CHECK((a.f - b.f).norm() == 0.0);
    CHECK(a.integration_points == b.integration_points);
  }
}

TEST_CASE("Dirichlet validation") {
  const auto sys = assemble(bare_problem(testing::two_triangles()));
  CHECK_THROWS_AS(apply_dirichlet(sys, {{4, 0, 0.0}}), InputError);
  CHECK_THROWS_AS(apply_dirichlet(sys, {{0, 2, 0.0}}), InputError);
  CHECK_THROWS_AS(apply_dirichlet(sys, {{0, 0, std::nan("")}}), InputError);
  CHECK_THROWS_AS(apply_dirichlet(sys, {{0, 0, 1.0}, {0, 0, 2.0}}), InputError);
  CHECK_NOTHROW(apply_dirichlet(sys, {{0, 0, 1.0}, {0, 0, 1.0}}));

  std::vector<DirichletCondition> all;
  for (int n = 0; n < 4; ++n) {
    for (int i = 0; i < 2; ++i) all.push_back({n, i, 0.1 * (n + 1) + i});
  }
  const auto rep = solve(apply_dirichlet(sys, all));
  for (const auto& c : all) CHECK(rep.u[2 * c.node + c.component] == doctest::Approx(c.value));
}

TEST_CASE("a clamped unloaded body does not move") {
  const auto mesh = voronoi_mesh(DomainGeometry::rectangle(1.0, 1.0), 30, 5, 1);
  auto p = bare_problem(mesh);
  for (int n : mesh.boundary_nodes()) {
    for (int i = 0; i < 2; ++i) p.loads.dirichlet.push_back({n, i, 0.0});
  }
  const auto rep = solve(apply_dirichlet(assemble(p), p.loads.dirichlet));
  CHECK(rep.u.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("affine fields are reproduced") {
  const Material m2{1.0, 0.3, StressState::plane_stress};
  const auto mesh2 = voronoi_mesh(DomainGeometry::rectangle(1.0, 1.0), 40, 10, 5);
  const auto mesh3 = polyhedral_box_mesh(DomainGeometry::box(Vec3(1, 1, 1)), 8, 2, 5, 5);
  for (const auto* mesh : {&mesh2, &mesh3}) {
    const auto exact = affine_exact(mesh->dim(), mesh->dim() == 2 ? m2 : Material{1.0, 0.3, StressState::solid});
    const auto p = affine_patch(*mesh, Method::csfem, exact);
    const auto rep = solve(apply_dirichlet(assemble(p), p.loads.dirichlet));
    CHECK(rep.relative_residual < 1e-10);
    const auto u_exact = nodal(*mesh, exact.displacement);
    CHECK((rep.u - u_exact).cwiseAbs().maxCoeff() < 1e-10);
    const auto field = recover_fields(p, rep.u);
    const Eigen::VectorXd eps = exact.strain(Vec3::Zero());
    double worst = 0.0;
    for (const auto& c : field.cells) worst = std::max(worst, (c.strain - eps).cwiseAbs().maxCoeff());
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("rigid translation produces no strain") {
  const auto mesh = voronoi_mesh(DomainGeometry::rectangle(1.0, 1.0), 20, 5, 2);
  for (auto method : {Method::csfem, Method::pfem}) {
    const auto p = bare_problem(mesh, method);
    const auto u = nodal(mesh, [](const Vec3&) { return Vec3(0.3, -0.2, 0.0); });
    const auto field = recover_fields(p, u);
    for (const auto& c : field.cells) CHECK(c.strain.norm() < 1e-13);
    CHECK(reactions(assemble(p), u).norm() < 1e-13);
  }
}

TEST_CASE("a single triangle solved by hand") {
  // Fix node 0 fully and node 1 vertically; pull node 1 with a unit force along x.
  const Mesh m(2, {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {{{0, 1, 2}, {}}});
  auto sys = assemble(bare_problem(m, Method::csfem, {1.0, 0.0, StressState::plane_stress}));
  sys.f[2] = 1.0;
  const auto rep = solve(apply_dirichlet(sys, {{0, 0, 0.0}, {0, 1, 0.0}, {1, 1, 0.0}, {2, 0, 0.0}}));
  // With nu = 0 the free dofs (u1, v2) decouple: k11 = E A / 1^2 = 0.5, k_v2 = 0.5.
  CHECK(rep.u[2] == doctest::Approx(2.0));
  CHECK(rep.u[5] == doctest::Approx(0.0));
}

TEST_CASE("node numbering does not change the solution") {
  const auto mesh = voronoi_mesh(DomainGeometry::rectangle(1.0, 1.0), 25, 5, 11);
  const auto exact = cantilever2d_exact();
  std::vector<int> perm(mesh.node_count());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(4));
  std::vector<Vec3> nodes(mesh.node_count());
  for (std::size_t n = 0; n < mesh.node_count(); ++n) nodes[perm[n]] = mesh.node(n);
  std::vector<PolyElement> elements = mesh.elements();
  for (auto& el : elements) {
    for (auto& v : el.vertices) v = perm[v];
  }
  const Mesh shuffled(2, nodes, elements);
  auto field = [&](const Mesh& m) {
    auto p = bare_problem(m);
    p.loads.body_force = [](const Vec3& x) { return Vec3(1.0, x.x(), 0.0); };
    for (int n : m.boundary_nodes()) {
      if (m.node(n).x() < 1e-12) p.loads.dirichlet.push_back({n, 0, 0.0}), p.loads.dirichlet.push_back({n, 1, 0.0});
    }
    return solve(apply_dirichlet(assemble(p), p.loads.dirichlet)).u;
  };
  const auto a = field(mesh);
  const auto b = field(shuffled);
  for (std::size_t n = 0; n < mesh.node_count(); ++n) {
    CHECK((a.segment<2>(2 * n) - b.segment<2>(2 * perm[n])).norm() < 1e-10 * a.norm());
  }
}

TEST_CASE("conjugate gradients") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  const int n = 40;
  Eigen::MatrixXd a(n, n);
  for (auto& x : a.reshaped()) x = g(rng);
  const Eigen::MatrixXd spd = a * a.transpose() + n * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd f(n);
  for (auto& x : f) x = g(rng);
  const auto rep = solve_pcg(spd.sparseView(), f, 1e-12, 10 * n);
  CHECK(rep.solver == "pcg");
  CHECK((spd * rep.u - f).norm() < 1e-10 * f.norm());
  CHECK(rep.residual_history.size() >= 2);
  CHECK(rep.residual_history.back() < rep.residual_history.front());

  ConstrainedSystem cs{spd.sparseView(), f, std::vector<char>(n, 0), Eigen::VectorXd::Zero(n)};
  SolverOptions opt;
  opt.kind = SolverOptions::Kind::cg;
  CHECK(solve(cs, opt).relative_residual < 1e-10);

  Eigen::MatrixXd singular(2, 2);
  singular << 1, 1, 1, 1;
  ConstrainedSystem bad{singular.sparseView(), Eigen::Vector2d(1, -1), {0, 0}, Eigen::Vector2d::Zero()};
  try {
    solve(bad, opt);
    FAIL("expected a solver failure");
  } catch (const SolverError& e) {
    CHECK(!e.residual_history().empty());
  }
}

TEST_CASE("support reactions balance the applied load") {
  const auto mesh = benchmark_mesh(Benchmark::cantilever2d, 0);
  const auto p = make_benchmark_problem(Benchmark::cantilever2d, mesh, Method::csfem);
  const auto sys = assemble(p);
  const auto rep = solve(apply_dirichlet(sys, p.loads.dirichlet));
  const auto r = reactions(sys, rep.u);
  std::vector<char> fixed(sys.ndof(), 0);
  for (const auto& c : p.loads.dirichlet) fixed[sys.dof(c.node, c.component)] = 1;
  double sum_y = 0.0, free_residual = 0.0;
  for (Eigen::Index i = 0; i < sys.ndof(); ++i) {
    if (fixed[i]) {
      if (i % 2 == 1) sum_y += r[i];
    } else {
      free_residual = std::max(free_residual, std::abs(r[i]));
    }
  }
  CHECK(free_residual < 1e-8 * sys.f.cwiseAbs().maxCoeff());
  CHECK(std::abs(std::abs(sum_y) - Cantilever2dParams{}.P) < 1e-8 * Cantilever2dParams{}.P);
}

TEST_CASE("cantilever bending stress changes sign across the axis") {
  const auto mesh = benchmark_mesh(Benchmark::cantilever2d, 1);
  const auto p = make_benchmark_problem(Benchmark::cantilever2d, mesh, Method::csfem);
  const auto rep = solve(apply_dirichlet(assemble(p), p.loads.dirichlet));
  const auto field = recover_fields(p, rep.u);
  const auto exact = cantilever2d_exact();
  double moment = 0.0, exact_moment = 0.0, net = 0.0, scale = 0.0;
  for (const auto& c : field.cells) {
    Vec3 centre = Vec3::Zero();
    for (const auto& v : c.vertices) centre += v / static_cast<double>(c.vertices.size());
    net += c.stress[0] * c.measure;
    scale += std::abs(c.stress[0]) * c.measure;
    moment += c.stress[0] * centre.y() * c.measure;
    exact_moment += exact.stress(centre)[0] * centre.y() * c.measure;
  }
  CHECK(std::abs(net) < 0.02 * scale);
  CHECK(moment * exact_moment > 0.0);
  CHECK(moment == doctest::Approx(exact_moment).epsilon(0.05));
}

TEST_CASE("VTK output") {
  const auto mesh = voronoi_mesh(DomainGeometry::rectangle(1.0, 1.0), 6, 2, 3);
  const auto p = bare_problem(mesh);
  const auto u = nodal(mesh, [](const Vec3& x) { return Vec3(0.01 * x.x(), 0.0, 0.0); });
  const auto field = recover_fields(p, u);
  const auto vtk = write_vtk(p, field);
  CHECK(vtk.rfind("# vtk DataFile Version", 0) == 0);
  CHECK(vtk.find("VECTORS displacement") != std::string::npos);
  CHECK(vtk.find("smoothed_stress 3") != std::string::npos);
  CHECK(vtk.find("CELLS " + std::to_string(field.cells.size())) != std::string::npos);
}
