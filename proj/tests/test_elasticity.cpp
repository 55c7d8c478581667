#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "sfem/elasticity.hpp"
#include "sfem/error.hpp"
#include "sfem/quadrature.hpp"
#include "support.hpp"

using namespace sfem;

namespace {

int zero_eigenvalues(const Eigen::MatrixXd& k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
  const double tol = 1e-10 * es.eigenvalues().cwiseAbs().maxCoeff();
  int zeros = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    CHECK(es.eigenvalues()[i] > -tol);
    zeros += std::abs(es.eigenvalues()[i]) <= tol;
  }
  return zeros;
}

// Closed-form constant strain triangle.
Eigen::MatrixXd cst(const std::vector<Vec3>& x, const Eigen::MatrixXd& d) {
  const double area2 = (x[1].x() - x[0].x()) * (x[2].y() - x[0].y()) - (x[2].x() - x[0].x()) * (x[1].y() - x[0].y());
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(3, 6);
  for (int i = 0; i < 3; ++i) {
    const auto& pj = x[(i + 1) % 3];
    const auto& pk = x[(i + 2) % 3];
    const double bi = (pj.y() - pk.y()) / area2;
    const double ci = (pk.x() - pj.x()) / area2;
    b(0, 2 * i) = bi;
    b(1, 2 * i + 1) = ci;
    b(2, 2 * i) = ci;
    b(2, 2 * i + 1) = bi;
  }
  return 0.5 * area2 * b.transpose() * d * b;
}

// Bilinear Q4 B-matrix on the unit square at (x, y), nodes ccw from the origin.
Eigen::MatrixXd q4_b(double x, double y) {
  const double dn[4][2] = {{-(1 - y), -(1 - x)}, {1 - y, -x}, {y, x}, {-y, 1 - x}};
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(3, 8);
  for (int a = 0; a < 4; ++a) {
    b(0, 2 * a) = dn[a][0];
    b(1, 2 * a + 1) = dn[a][1];
    b(2, 2 * a) = dn[a][1];
    b(2, 2 * a + 1) = dn[a][0];
  }
  return b;
}

}  // namespace

TEST_CASE("material matrices") {
  const auto ps = d_matrix({200.0, 0.25, StressState::plane_stress});
  CHECK(ps(0, 0) == doctest::Approx(200.0 / (1 - 0.0625)));
  CHECK(ps(0, 1) == doctest::Approx(0.25 * 200.0 / (1 - 0.0625)));
  CHECK(ps(2, 2) == doctest::Approx(200.0 / (2 * 1.25)));
  const auto pe = d_matrix({1.0, 0.3, StressState::plane_strain});
  CHECK(pe(0, 0) == doctest::Approx(0.7 / (1.3 * 0.4)));
  const auto s = d_matrix({1.0, 0.3, StressState::solid});
  CHECK(s.rows() == 6);
  CHECK(s(0, 1) == doctest::Approx(0.3 / (1.3 * 0.4)));
  CHECK(s(5, 5) == doctest::Approx(1.0 / 2.6));
  CHECK_THROWS_AS(d_matrix({1.0, 0.5, StressState::solid}), InputError);
  CHECK_THROWS_AS(d_matrix({0.0, 0.3, StressState::solid}), InputError);
  CHECK(parse_method("pfem") == Method::pfem);
  CHECK_THROWS_AS(parse_method("fem"), InputError);
}

TEST_CASE("CSFEM on a triangle is the constant strain triangle") {
  std::mt19937_64 rng(21);
  const Material mat{3e7, 0.3, StressState::plane_stress};
  for (int trial = 0; trial < 10; ++trial) {
    const auto xs = testing::random_convex_polygon(rng, 3);
    const auto m = testing::single_polygon(xs);
    const auto k = stiffness_csfem(m, 0, mat);
    const auto ref = cst(xs, d_matrix(mat));
    CHECK((k.matrix - ref).norm() <= 1e-12 * ref.norm());
    CHECK(k.integration_points == 3);
  }
}

TEST_CASE("single-subcell CSFEM on a square is one-point Q4") {
  const Material mat{1.0, 0.3, StressState::plane_stress};
  const auto k = stiffness_csfem(testing::unit_square(), 0, mat, SubcellScheme::whole_element);
  const auto b = q4_b(0.5, 0.5);
  const Eigen::MatrixXd ref = b.transpose() * d_matrix(mat) * b;
  CHECK((k.matrix - ref).norm() <= 1e-12 * ref.norm());
  CHECK(k.integration_points == 1);
}

TEST_CASE("PFEM on a square is the exact Q4 stiffness") {
  const Material mat{1.0, 0.3, StressState::plane_strain};
  Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(8, 8);
  const double g[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  for (double x : g) {
    for (double y : g) {
      const auto b = q4_b(x, y);
      ref += 0.25 * b.transpose() * d_matrix(mat) * b;
    }
  }
  for (int degree : {2, 3, 6}) {
    const auto k = stiffness_pfem(testing::unit_square(), 0, mat, degree);
    CHECK((k.matrix - ref).norm() <= 1e-10 * ref.norm());
  }
}

TEST_CASE("element stiffness is symmetric with rigid-body null space") {
  std::mt19937_64 rng(8);
  const Material m2{1.0, 0.3, StressState::plane_stress};
  const Material m3{1.0, 0.3, StressState::solid};
  for (int trial = 0; trial < 5; ++trial) {
    const auto poly = testing::random_convex_polygon(rng, 4 + trial);
    const auto m = testing::single_polygon(poly);
    for (const auto& k : {stiffness_csfem(m, 0, m2), stiffness_pfem(m, 0, m2, 4)}) {
      CHECK((k.matrix - k.matrix.transpose()).norm() == 0.0);
      CHECK(zero_eigenvalues(k.matrix) == 3);
    }
    const auto p = testing::prism(poly);
    for (const auto& k : {stiffness_csfem(p, 0, m3), stiffness_pfem(p, 0, m3, 2)}) {
      CHECK(zero_eigenvalues(k.matrix) == 6);
    }
  }
}

TEST_CASE("integration point accounting") {
  const auto hex = testing::prism({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)});
  const Material mat{1.0, 0.3, StressState::solid};
  const auto c = stiffness_csfem(hex, 0, mat);
  const auto p = stiffness_pfem(hex, 0, mat, reproduction_pfem_degree(3));
  CHECK(c.integration_points == 24);  // 6 quadrilateral faces x 4 edges
  CHECK(p.integration_points == 24 * tetrahedron_rule(reproduction_pfem_degree(3)).size());
  CHECK(p.integration_points >= 100 * c.integration_points);
}

TEST_CASE("consistent loads") {
  std::mt19937_64 rng(13);
  const auto poly = testing::random_convex_polygon(rng, 6);
  const auto m = testing::single_polygon(poly);
  const double area = element_measure(m, 0);
  const auto fb = body_force_vector(m, 0, [](const Vec3&) { return Vec3(2.0, -1.0, 0.0); }, 4);
  CHECK(fb(Eigen::seq(0, Eigen::last, 2)).sum() == doctest::Approx(2.0 * area));
  CHECK(fb(Eigen::seq(1, Eigen::last, 2)).sum() == doctest::Approx(-1.0 * area));

  const double len = (poly[3] - poly[2]).norm();
  const auto ft = traction_vector(m, 0, 2, [](const Vec3&) { return Vec3(0.0, 3.0, 0.0); });
  CHECK(ft(Eigen::seq(1, Eigen::last, 2)).sum() == doctest::Approx(3.0 * len));
  CHECK(ft[5] == doctest::Approx(1.5 * len));  // node 2, y
  CHECK(ft[1] == 0.0);

  const auto two = testing::two_triangles();
  CHECK_THROWS_AS(traction_vector(two, 0, 2, [](const Vec3&) { return Vec3::Zero(); }), InputError);

  const auto cube = testing::unit_cube();
  const auto f3 = traction_vector(cube, 0, 1, [](const Vec3& x) { return Vec3(0, 0, x.x()); });
  CHECK(f3(Eigen::seq(2, Eigen::last, 3)).sum() == doctest::Approx(0.5));
}
