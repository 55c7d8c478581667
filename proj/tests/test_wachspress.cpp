#include <doctest.h>

#include <numbers>
#include <random>

#include "sfem/error.hpp"
#include "sfem/wachspress.hpp"
#include "support.hpp"

using namespace sfem;

namespace {

std::vector<Eigen::Vector2d> planar(const std::vector<Vec3>& xs) {
  std::vector<Eigen::Vector2d> out;
  for (const auto& x : xs) out.push_back(x.head<2>());
  return out;
}

}  // namespace

TEST_CASE("square coordinates are bilinear") {
  const Wachspress2d w({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  for (const auto& p : {Eigen::Vector2d(0.25, 0.5), Eigen::Vector2d(0.1, 0.9), Eigen::Vector2d(0.7, 0.3)}) {
    const double x = p.x(), y = p.y();
    const Eigen::Vector4d bilinear((1 - x) * (1 - y), x * (1 - y), x * y, (1 - x) * y);
    CHECK((w.values(p) - bilinear).norm() < 1e-14);
    const auto g = w.evaluate_with_gradients(p).gradients;
    CHECK(g(0, 0) == doctest::Approx(-(1 - y)));
    CHECK(g(2, 1) == doctest::Approx(x));
  }
}

TEST_CASE("triangle coordinates are barycentric") {
  const Wachspress2d w({{0, 0}, {2, 0}, {0, 1}});
  const Eigen::Vector2d p(0.5, 0.25);
  const Eigen::Vector3d expect(1 - 0.25 - 0.25, 0.25, 0.25);
  CHECK((w.values(p) - expect).norm() < 1e-14);
}

TEST_CASE("regular pentagon centre is symmetric") {
  std::vector<Eigen::Vector2d> xs;
  for (int i = 0; i < 5; ++i) xs.emplace_back(std::cos(2 * std::numbers::pi * i / 5), std::sin(2 * std::numbers::pi * i / 5));
  const Wachspress2d w(xs);
  const auto phi = w.values(Eigen::Vector2d::Zero());
  for (int i = 0; i < 5; ++i) CHECK(phi[i] == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("edge points interpolate linearly between the edge vertices") {
  std::mt19937_64 rng(3);
  const auto xs = planar(testing::random_convex_polygon(rng, 6));
  const Wachspress2d w(xs);
  const Eigen::Vector2d p = 0.3 * xs[2] + 0.7 * xs[3];
  const auto phi = w.values(p);
  CHECK(phi[2] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(phi[3] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(phi.sum() == doctest::Approx(1.0));
  CHECK((w.values(xs[4]) - Eigen::VectorXd::Unit(6, 4)).norm() < 1e-12);
}

TEST_CASE("invalid evaluations") {
  const Wachspress2d w({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK_THROWS_AS(w.values(Eigen::Vector2d(1.5, 0.5)), GeometryError);
  CHECK_THROWS_AS(w.evaluate_with_gradients(Eigen::Vector2d(1.0, 0.5)), GeometryError);
  CHECK_THROWS_AS(Wachspress2d({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), GeometryError);       // clockwise
  CHECK_THROWS_AS(Wachspress2d({{0, 0}, {2, 0}, {0.5, 0.5}, {0, 2}}), GeometryError);   // reflex
  CHECK_THROWS_AS(Wachspress2d({{0, 0}, {1, 0}}), GeometryError);
}

TEST_CASE("gradients match central differences on random polygons") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto poly = testing::random_convex_polygon(rng, 3 + trial % 8);
    const Wachspress2d w(planar(poly));
    const Vec3 p = testing::random_interior_point(rng, poly);
    const Eigen::Vector2d x = p.head<2>();
    const auto g = w.evaluate_with_gradients(x).gradients;
    const double h = 1e-6;
    for (int k = 0; k < 2; ++k) {
      const Eigen::Vector2d dx = h * Eigen::Vector2d::Unit(k);
      const Eigen::VectorXd fd = (w.values(x + dx) - w.values(x - dx)) / (2 * h);
      CHECK((fd - g.col(k)).norm() <= 1e-6 * std::max(1.0, g.norm()));
    }
  }
}

TEST_CASE("cube coordinates are trilinear") {
  const auto m = testing::unit_cube();
  const auto b = ElementBasis::from_mesh(m, 0);
  const Vec3 p(0.2, 0.6, 0.3);
  const auto phi = b.values(p);
  for (std::size_t v = 0; v < 8; ++v) {
    const Vec3 c = m.node(v);
    const double expect = (c.x() > 0.5 ? p.x() : 1 - p.x()) * (c.y() > 0.5 ? p.y() : 1 - p.y()) *
                          (c.z() > 0.5 ? p.z() : 1 - p.z());
    CHECK(phi[static_cast<Eigen::Index>(v)] == doctest::Approx(expect).epsilon(1e-13));
  }
  // face point: bilinear on the face z = 1
  const auto top = b.values(Vec3(0.25, 0.5, 1.0));
  CHECK(top[4] + top[5] + top[6] + top[7] == doctest::Approx(1.0));
  CHECK(top[6] == doctest::Approx(0.125));
}

TEST_CASE("prism gradients match central differences") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = testing::prism(testing::random_convex_polygon(rng, 3 + trial % 6), -0.3, 0.8);
    const auto b = ElementBasis::from_mesh(m, 0);
    const Vec3 x = testing::random_interior_point(rng, m.nodes());
    const auto g = b.evaluate_with_gradients(x).gradients;
    const double h = 1e-6;
    for (int k = 0; k < 3; ++k) {
      const Vec3 dx = h * Vec3::Unit(k);
      const Eigen::VectorXd fd = (b.values(x + dx) - b.values(x - dx)) / (2 * h);
      CHECK((fd - g.col(k)).norm() <= 1e-6 * std::max(1.0, g.norm()));
    }
  }
}

TEST_CASE("3D coordinates need simple vertices") {
  // square pyramid: apex has four incident faces
  std::vector<Vec3> xs{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0), Vec3(0.5, 0.5, 1)};
  std::vector<std::vector<int>> faces{{3, 2, 1, 0}, {0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
  CHECK_THROWS_AS(Wachspress3d(xs, faces), GeometryError);
}
