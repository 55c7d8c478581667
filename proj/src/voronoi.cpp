#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include <Eigen/Core>

#include "sfem/error.hpp"
#include "sfem/mesh_gen.hpp"

namespace sfem {

DomainGeometry DomainGeometry::rectangle(double length, double depth, double x0, double y0) {
  DomainGeometry d;
  d.kind = Kind::rectangle;
  d.origin = Vec3(x0, y0, 0.0);
  d.extents = Vec3(length, depth, 0.0);
  d.check();
  return d;
}

DomainGeometry DomainGeometry::quarter_plate_with_hole(double radius, double side) {
  DomainGeometry d;
  d.kind = Kind::quarter_plate_with_hole;
  d.extents = Vec3(side, side, 0.0);
  d.hole_radius = radius;
  d.check();
  return d;
}

DomainGeometry DomainGeometry::box(const Vec3& extents, const Vec3& origin) {
  DomainGeometry d;
  d.kind = Kind::box;
  d.origin = origin;
  d.extents = extents;
  d.check();
  return d;
}

double DomainGeometry::measure() const {
  switch (kind) {
    case Kind::rectangle: return extents.x() * extents.y();
    case Kind::quarter_plate_with_hole:
      return extents.x() * extents.y() - 0.25 * std::numbers::pi * hole_radius * hole_radius;
    case Kind::box: return extents.prod();
  }
  return 0.0;
}

void DomainGeometry::check() const {
  const int d = dim();
  for (int i = 0; i < d; ++i) {
    if (!(extents[i] > 0.0)) throw InputError("domain extents must be positive");
  }
  if (kind == Kind::quarter_plate_with_hole) {
    if (!(hole_radius > 0.0)) throw InputError("hole radius must be positive");
    if (!(hole_radius < extents.x())) throw InputError("hole radius must be smaller than the plate side");
  }
}

namespace {

using Vec2 = Eigen::Vector2d;
using Polygon = std::vector<Vec2>;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Keeps the part of a convex polygon with normal.dot(x) <= offset.
Polygon clip(const Polygon& poly, const Vec2& normal, double offset) {
  Polygon out;
  out.reserve(poly.size() + 1);
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    const double dp = normal.dot(p) - offset;
    const double dq = normal.dot(q) - offset;
    if (dp <= 0.0) out.push_back(p);
    if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) out.push_back(p + (dp / (dp - dq)) * (q - p));
  }
  return out;
}

double polygon_area(const Polygon& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross2(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

Vec2 polygon_centroid(const Polygon& poly) {
  Vec2 c = Vec2::Zero();
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    const double w = cross2(p, q);
    a += w;
    c += w * (p + q);
  }
  return c / (3.0 * a);
}

struct Generator {
  const DomainGeometry& domain;
  int n;
  std::uint64_t seed;

  Vec2 lo() const { return domain.origin.head<2>(); }
  Vec2 hi() const { return (domain.origin + domain.extents).head<2>(); }
  double spacing() const { return std::sqrt(domain.measure() / n); }

  bool inside(const Vec2& p) const {
    if (domain.kind == DomainGeometry::Kind::quarter_plate_with_hole && p.norm() <= domain.hole_radius) return false;
    return true;
  }

  std::vector<Vec2> initial_seeds() const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(lo().x(), hi().x());
    std::uniform_real_distribution<double> uy(lo().y(), hi().y());
    std::vector<Vec2> seeds;
    seeds.reserve(n);
    while (static_cast<int>(seeds.size()) < n) {
      const double x = ux(rng);
      const Vec2 p(x, uy(rng));
      if (inside(p)) seeds.push_back(p);
    }
    return seeds;
  }

  // Mirror images of seeds close to the hole, placed inside the disc.
  std::vector<Vec2> reflections(const std::vector<Vec2>& seeds) const {
    std::vector<Vec2> out;
    if (domain.kind != DomainGeometry::Kind::quarter_plate_with_hole) return out;
    const double a = domain.hole_radius;
    const double band = std::min(1.5 * spacing(), 0.9 * a);
    for (const auto& p : seeds) {
      const double r = p.norm();
      if (r - a < band) out.push_back(p * ((2.0 * a - r) / r));
    }
    return out;
  }

  std::vector<Polygon> cells(const std::vector<Vec2>& seeds) const {
    std::vector<Vec2> sites = seeds;
    const auto mirrored = reflections(seeds);
    sites.insert(sites.end(), mirrored.begin(), mirrored.end());

    const Polygon frame{lo(), Vec2(hi().x(), lo().y()), hi(), Vec2(lo().x(), hi().y())};
    std::vector<Polygon> out(seeds.size());
    std::vector<std::size_t> order(sites.size());
    std::vector<double> dist(sites.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      for (std::size_t j = 0; j < sites.size(); ++j) dist[j] = (sites[j] - seeds[i]).norm();
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
      });
      Polygon poly = frame;
      for (std::size_t j : order) {
        if (j == i) continue;
        double reach = 0.0;
        for (const auto& v : poly) reach = std::max(reach, (v - seeds[i]).norm());
        if (dist[j] > 2.0 * reach) break;
        const Vec2 normal = sites[j] - seeds[i];
        poly = clip(poly, normal, normal.dot(0.5 * (sites[j] + seeds[i])));
        if (poly.size() < 3) break;
      }
      if (poly.size() < 3 || polygon_area(poly) <= 0.0) {
        std::ostringstream os;
        os << "degenerate Voronoi cell for seed " << i << " at (" << seeds[i].x() << ", " << seeds[i].y()
           << "), rng seed " << seed;
        throw GeometryError(os.str());
      }
      out[i] = std::move(poly);
    }
    return out;
  }
};

// Merges vertices closer than `tol` and returns per-cell loops of node ids.
struct Welder {
  double tol;
  std::vector<Vec2> points;
  std::unordered_map<long long, std::vector<int>> buckets;

  long long key(long long ix, long long iy) const { return ix * 1000003LL + iy; }

  int insert(const Vec2& p) {
    const double cell = 4.0 * tol;
    const long long ix = static_cast<long long>(std::floor(p.x() / cell));
    const long long iy = static_cast<long long>(std::floor(p.y() / cell));
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = buckets.find(key(ix + dx, iy + dy));
        if (it == buckets.end()) continue;
        for (int id : it->second) {
          if ((points[id] - p).norm() <= tol) return id;
        }
      }
    }
    const int id = static_cast<int>(points.size());
    points.push_back(p);
    buckets[key(ix, iy)].push_back(id);
    return id;
  }
};

}  // namespace

Mesh voronoi_mesh(const DomainGeometry& domain, int n_elements, int lloyd_iterations, std::uint64_t rng_seed) {
  domain.check();
  if (domain.kind == DomainGeometry::Kind::box) throw InputError("voronoi_mesh needs a 2D domain; use polyhedral_box_mesh");
  if (n_elements < 4) throw InputError("voronoi_mesh needs at least 4 elements");
  if (lloyd_iterations < 0) throw InputError("lloyd iteration count must be non-negative");

  const Generator gen{domain, n_elements, rng_seed};
  auto seeds = gen.initial_seeds();
  for (int it = 0; it < lloyd_iterations; ++it) {
    const auto polys = gen.cells(seeds);
    for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = polygon_centroid(polys[i]);
  }
  const auto polys = gen.cells(seeds);

  Welder welder{1e-8 * gen.spacing(), {}, {}};
  std::vector<std::vector<int>> loops;
  loops.reserve(polys.size());
  for (const auto& poly : polys) {
    std::vector<int> loop;
    for (const auto& v : poly) {
      const int id = welder.insert(v);
      if (loop.empty() || loop.back() != id) loop.push_back(id);
    }
    while (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
    loops.push_back(std::move(loop));
  }

  // Drop straight-angle vertices owned by a single cell; they carry no
  // Wachspress weight and removing them keeps the mesh conforming.
  std::vector<int> owners(welder.points.size(), 0);
  for (const auto& loop : loops) {
    for (int v : loop) ++owners[v];
  }
  for (auto& loop : loops) {
    bool changed = true;
    while (changed && loop.size() > 3) {
      changed = false;
      for (std::size_t i = 0; i < loop.size(); ++i) {
        const int v = loop[i];
        if (owners[v] != 1) continue;
        const Vec2 a = welder.points[v] - welder.points[loop[(i + loop.size() - 1) % loop.size()]];
        const Vec2 b = welder.points[loop[(i + 1) % loop.size()]] - welder.points[v];
        if (cross2(a, b) <= 1e-6 * a.norm() * b.norm()) {
          owners[v] = 0;
          loop.erase(loop.begin() + static_cast<std::ptrdiff_t>(i));
          changed = true;
          break;
        }
      }
    }
  }

  std::vector<int> renumber(welder.points.size(), -1);
  std::vector<Vec3> nodes;
  std::vector<PolyElement> elements;
  elements.reserve(loops.size());
  for (const auto& loop : loops) {
    PolyElement el;
    for (int v : loop) {
      if (renumber[v] < 0) {
        renumber[v] = static_cast<int>(nodes.size());
        nodes.emplace_back(welder.points[v].x(), welder.points[v].y(), 0.0);
      }
      el.vertices.push_back(renumber[v]);
    }
    elements.push_back(std::move(el));
  }

  Mesh mesh(2, std::move(nodes), std::move(elements));
  const auto report = validate_mesh(mesh);
  if (!report.ok()) {
    std::ostringstream os;
    os << "Voronoi generation produced invalid cells (rng seed " << rng_seed << "):\n" << report.summary();
    throw GeometryError(os.str());
  }
  return mesh;
}

double discrete_domain_measure(const DomainGeometry& domain, const Mesh& mesh) {
  if (domain.kind != DomainGeometry::Kind::quarter_plate_with_hole) return domain.measure();

  const double side = domain.extents.x();
  const double tol = 1e-9 * side;
  // Hole boundary nodes: boundary nodes off the outer edges, plus the first
  // node along each symmetry axis.
  std::vector<Vec2> hole;
  Vec2 on_x(side, 0.0);
  Vec2 on_y(0.0, side);
  for (int v : mesh.boundary_nodes()) {
    const Vec2 p = mesh.node(v).head<2>();
    if (p.x() > side - tol || p.y() > side - tol) continue;
    if (p.y() < tol) {
      if (p.x() < on_x.x()) on_x = p;
    } else if (p.x() < tol) {
      if (p.y() < on_y.y()) on_y = p;
    } else {
      hole.push_back(p);
    }
  }
  hole.push_back(on_x);
  hole.push_back(on_y);
  std::sort(hole.begin(), hole.end(),
            [](const Vec2& a, const Vec2& b) { return std::atan2(a.y(), a.x()) < std::atan2(b.y(), b.x()); });
  hole.insert(hole.begin(), Vec2::Zero());
  return side * side - polygon_area(hole);
}

Mesh extrude_mesh(const Mesh& mesh2d, int layers, double height, double z0) {
  if (mesh2d.dim() != 2) throw InputError("extrude_mesh expects a 2D mesh");
  if (layers < 1) throw InputError("extrusion needs at least one layer");
  if (!(height > 0.0)) throw InputError("extrusion height must be positive");
  const auto report = validate_mesh(mesh2d);
  if (!report.ok()) throw GeometryError("cannot extrude an invalid or non-convex polygon mesh:\n" + report.summary());

  const int nb = static_cast<int>(mesh2d.node_count());
  std::vector<Vec3> nodes;
  nodes.reserve(static_cast<std::size_t>(nb) * (layers + 1));
  for (int k = 0; k <= layers; ++k) {
    const double z = z0 + height * static_cast<double>(k) / layers;
    for (const auto& x : mesh2d.nodes()) nodes.emplace_back(x.x(), x.y(), z);
  }

  std::vector<PolyElement> elements;
  elements.reserve(mesh2d.element_count() * layers);
  for (int k = 0; k < layers; ++k) {
    for (const auto& poly : mesh2d.elements()) {
      const int n = static_cast<int>(poly.vertices.size());
      PolyElement el;
      std::vector<int> bottom;
      std::vector<int> top;
      for (int v : poly.vertices) {
        bottom.push_back(k * nb + v);
        top.push_back((k + 1) * nb + v);
      }
      el.vertices = bottom;
      el.vertices.insert(el.vertices.end(), top.begin(), top.end());
      el.faces.emplace_back(bottom.rbegin(), bottom.rend());
      el.faces.push_back(top);
      for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        el.faces.push_back({bottom[i], bottom[j], top[j], top[i]});
      }
      elements.push_back(std::move(el));
    }
  }
  return Mesh(3, std::move(nodes), std::move(elements));
}

Mesh polyhedral_box_mesh(const DomainGeometry& box, int n_base_elements, int layers, int lloyd_iterations,
                         std::uint64_t rng_seed) {
  if (box.kind != DomainGeometry::Kind::box) throw InputError("polyhedral_box_mesh needs a box domain");
  box.check();
  const auto base = DomainGeometry::rectangle(box.extents.x(), box.extents.y(), box.origin.x(), box.origin.y());
  return extrude_mesh(voronoi_mesh(base, n_base_elements, lloyd_iterations, rng_seed), layers, box.extents.z(),
                      box.origin.z());
}

}  // namespace sfem
