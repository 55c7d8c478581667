#include <doctest.h>

#include <cmath>

#include "sfem/quadrature.hpp"

using namespace sfem;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

}  // namespace

TEST_CASE("Gauss-Legendre integrates degree 2n-1 on [0,1]") {
  for (int n = 1; n <= 10; ++n) {
    double wsum = 0.0;
    for (const auto& p : gauss_legendre(n)) wsum += p.weight;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (const auto& p : gauss_legendre(n)) s += p.weight * std::pow(p.t, k);
      CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("triangle rules are exact to their degree") {
  // mean of x^a y^b over the reference triangle = 2 a! b! / (a+b+2)!
  for (int degree = 1; degree <= 10; ++degree) {
    for (int a = 0; a <= degree; ++a) {
      for (int b = 0; a + b <= degree; ++b) {
        double s = 0.0;
        for (const auto& q : triangle_rule(degree)) s += q.weight * std::pow(q.bary[1], a) * std::pow(q.bary[2], b);
        CHECK(s == doctest::Approx(2.0 * factorial(a) * factorial(b) / factorial(a + b + 2)).epsilon(1e-12));
      }
    }
  }
  for (const auto& q : triangle_rule(4)) {
    CHECK(q.bary[0] + q.bary[1] + q.bary[2] == doctest::Approx(1.0));
    CHECK(q.bary[0] > 0.0);
  }
}

TEST_CASE("tetrahedron rules are exact to their degree") {
  for (int degree = 1; degree <= 8; ++degree) {
    for (int a = 0; a <= degree; ++a) {
      for (int b = 0; a + b <= degree; ++b) {
        for (int c = 0; a + b + c <= degree; ++c) {
          double s = 0.0;
          for (const auto& q : tetrahedron_rule(degree)) {
            s += q.weight * std::pow(q.bary[1], a) * std::pow(q.bary[2], b) * std::pow(q.bary[3], c);
          }
          const double exact = 6.0 * factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3);
          CHECK(s == doctest::Approx(exact).epsilon(1e-12));
        }
      }
    }
  }
  CHECK(tetrahedron_rule(6).size() >= 100);
}

TEST_CASE("three-point triangle rule has degree 2") {
  const auto& r = triangle_three_point_rule();
  CHECK(r.size() == 3);
  for (int a = 0; a <= 2; ++a) {
    for (int b = 0; a + b <= 2; ++b) {
      double s = 0.0;
      for (const auto& q : r) s += q.weight * std::pow(q.bary[1], a) * std::pow(q.bary[2], b);
      CHECK(s == doctest::Approx(2.0 * factorial(a) * factorial(b) / factorial(a + b + 2)).epsilon(1e-14));
    }
  }
}
