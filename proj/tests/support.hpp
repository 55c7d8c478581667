#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "sfem/mesh.hpp"

namespace testing {

using sfem::Mesh;
using sfem::PolyElement;
using sfem::Vec3;

inline Mesh single_polygon(const std::vector<Vec3>& xs) {
  PolyElement el;
  for (int i = 0; i < static_cast<int>(xs.size()); ++i) el.vertices.push_back(i);
  return Mesh(2, xs, {el});
}

inline Mesh unit_square() { return single_polygon({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)}); }

// Unit square split along the diagonal (0,0)-(1,1).
inline Mesh two_triangles() {
  return Mesh(2, {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)}, {{{0, 1, 2}, {}}, {{0, 2, 3}, {}}});
}

// Counterclockwise convex polygon with vertices on an ellipse at random angles.
inline std::vector<Vec3> random_convex_polygon(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> angles;
  while (static_cast<int>(angles.size()) < n) {
    angles.clear();
    for (int i = 0; i < n; ++i) angles.push_back(2.0 * std::numbers::pi * u(rng));
    std::sort(angles.begin(), angles.end());
    // reject nearly coincident vertices
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      const double gap = i + 1 < n ? angles[i + 1] - angles[i] : angles[0] + 2.0 * std::numbers::pi - angles[i];
      ok = ok && gap > 0.15 && gap < std::numbers::pi - 0.1;
    }
    if (!ok) angles.clear();
  }
  const double rx = 0.5 + u(rng), ry = 0.5 + u(rng), cx = u(rng) - 0.5, cy = u(rng) - 0.5;
  std::vector<Vec3> xs;
  for (double t : angles) xs.emplace_back(cx + rx * std::cos(t), cy + ry * std::sin(t), 0.0);
  return xs;
}

// Prism over a counterclockwise polygon, z in [z0, z0 + h]. Faces are
// outward oriented: bottom reversed, top as given, sides (b_i, b_j, t_j, t_i).
inline Mesh prism(const std::vector<Vec3>& base, double z0 = 0.0, double h = 1.0) {
  const int n = static_cast<int>(base.size());
  std::vector<Vec3> nodes;
  for (const auto& x : base) nodes.emplace_back(x.x(), x.y(), z0);
  for (const auto& x : base) nodes.emplace_back(x.x(), x.y(), z0 + h);
  PolyElement el;
  for (int i = 0; i < 2 * n; ++i) el.vertices.push_back(i);
  std::vector<int> bottom, top;
  for (int i = n - 1; i >= 0; --i) bottom.push_back(i);
  for (int i = 0; i < n; ++i) top.push_back(n + i);
  el.faces.push_back(bottom);
  el.faces.push_back(top);
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    el.faces.push_back({i, j, n + j, n + i});
  }
  return Mesh(3, nodes, {el});
}

inline Mesh unit_cube() { return prism({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)}); }

// Uniform point inside a convex polygon/polyhedron via random convex weights.
inline Vec3 random_interior_point(std::mt19937_64& rng, const std::vector<Vec3>& xs) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(xs.size());
  double total = 0.0;
  for (auto& wi : w) total += (wi = e(rng));
  Vec3 p = Vec3::Zero();
  for (std::size_t i = 0; i < xs.size(); ++i) p += (w[i] / total) * xs[i];
  return p;
}

}  // namespace testing
