#include "sfem/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sfem {

namespace {

std::vector<LinePoint> compute_gauss_legendre(int n) {
  std::vector<LinePoint> rule(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule[n - 1 - i] = {0.5 * (x + 1.0), 0.5 * w};
  }
  return rule;
}

std::mutex cache_mutex;

template <class Key, class Value, class Make>
const Value& cached(std::map<Key, Value>& cache, const Key& key, Make make) {
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, make()).first;
  return it->second;
}

void check_degree(int degree) {
  if (degree < 0 || degree > 40) throw std::invalid_argument("unsupported quadrature degree " + std::to_string(degree));
}

}  // namespace

const std::vector<LinePoint>& gauss_legendre(int n) {
  if (n < 1 || n > 64) throw std::invalid_argument("unsupported Gauss-Legendre point count " + std::to_string(n));
  static std::map<int, std::vector<LinePoint>> cache;
  return cached(cache, n, [n] { return compute_gauss_legendre(n); });
}

const SimplexRule& triangle_rule(int degree) {
  check_degree(degree);
  static std::map<int, SimplexRule> cache;
  return cached(cache, degree, [degree] {
    // collapsed map: l1 = s, l2 = (1 - s) t, jacobian (1 - s)
    const int m = (degree + 3) / 2;
    const auto g = compute_gauss_legendre(m);
    SimplexRule rule;
    for (const auto& ps : g) {
      for (const auto& pt : g) {
        const double l1 = ps.t;
        const double l2 = (1.0 - ps.t) * pt.t;
        rule.push_back({{1.0 - l1 - l2, l1, l2, 0.0}, 2.0 * ps.weight * pt.weight * (1.0 - ps.t)});
      }
    }
    return rule;
  });
}

const SimplexRule& tetrahedron_rule(int degree) {
  check_degree(degree);
  static std::map<int, SimplexRule> cache;
  return cached(cache, degree, [degree] {
    const int m = (degree + 4) / 2;
    const auto g = compute_gauss_legendre(m);
    SimplexRule rule;
    for (const auto& ps : g) {
      for (const auto& pt : g) {
        for (const auto& pu : g) {
          const double l1 = ps.t;
          const double l2 = (1.0 - ps.t) * pt.t;
          const double l3 = (1.0 - ps.t) * (1.0 - pt.t) * pu.t;
          const double jac = (1.0 - ps.t) * (1.0 - ps.t) * (1.0 - pt.t);
          rule.push_back({{1.0 - l1 - l2 - l3, l1, l2, l3}, 6.0 * ps.weight * pt.weight * pu.weight * jac});
        }
      }
    }
    return rule;
  });
}

const SimplexRule& triangle_three_point_rule() {
  static const SimplexRule rule{
      {{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 0.0}, 1.0 / 3.0},
      {{1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0, 0.0}, 1.0 / 3.0},
      {{1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0, 0.0}, 1.0 / 3.0},
  };
  return rule;
}

}  // namespace sfem
