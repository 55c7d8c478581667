#include "sfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <utility>

#include "sfem/error.hpp"

namespace sfem {

Mesh::Mesh(int dim, std::vector<Vec3> nodes, std::vector<PolyElement> elements)
    : dim_(dim), nodes_(std::move(nodes)), elements_(std::move(elements)) {
  if (dim_ != 2 && dim_ != 3) throw InputError("mesh dimension must be 2 or 3, got " + std::to_string(dim_));
  for (const auto& x : nodes_) {
    if (!x.allFinite()) throw InputError("mesh node with non-finite coordinates");
  }
  index_facets();
}

int Mesh::facet_count(std::size_t e) const {
  const auto& el = elements_[e];
  return dim_ == 2 ? static_cast<int>(el.vertices.size()) : static_cast<int>(el.faces.size());
}

std::vector<int> Mesh::facet_nodes(std::size_t e, int facet) const {
  const auto& el = elements_[e];
  if (dim_ == 2) {
    const int n = static_cast<int>(el.vertices.size());
    return {el.vertices[facet], el.vertices[(facet + 1) % n]};
  }
  return el.faces[facet];
}

bool Mesh::is_boundary_facet(std::size_t e, int facet) const { return on_boundary_[e][facet] != 0; }

std::vector<int> Mesh::boundary_nodes() const {
  std::set<int> nodes;
  for (const auto& ref : boundary_) {
    for (int v : facet_nodes(ref.element, ref.facet)) nodes.insert(v);
  }
  return {nodes.begin(), nodes.end()};
}

void Mesh::index_facets() {
  std::map<std::vector<int>, int> uses;
  on_boundary_.assign(elements_.size(), {});
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    const int nf = facet_count(e);
    on_boundary_[e].assign(nf, 0);
    for (int f = 0; f < nf; ++f) {
      auto key = facet_nodes(e, f);
      std::sort(key.begin(), key.end());
      ++uses[key];
    }
  }
  boundary_.clear();
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    for (int f = 0; f < facet_count(e); ++f) {
      auto key = facet_nodes(e, f);
      std::sort(key.begin(), key.end());
      if (uses[key] == 1) {
        on_boundary_[e][f] = 1;
        boundary_.push_back({e, f});
      }
    }
  }
}

std::vector<Vec3> element_coords(const Mesh& mesh, std::size_t e) {
  const auto& el = mesh.element(e);
  std::vector<Vec3> xs;
  xs.reserve(el.vertices.size());
  for (int v : el.vertices) xs.push_back(mesh.node(v));
  return xs;
}

Vec3 area_vector(const std::vector<Vec3>& loop) {
  Vec3 a = Vec3::Zero();
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) a += loop[i].cross(loop[(i + 1) % n]);
  return 0.5 * a;
}

namespace {

std::vector<Vec3> gather(const Mesh& mesh, const std::vector<int>& ids) {
  std::vector<Vec3> xs;
  xs.reserve(ids.size());
  for (int v : ids) xs.push_back(mesh.node(v));
  return xs;
}

Vec3 mean(const std::vector<Vec3>& xs) {
  Vec3 c = Vec3::Zero();
  for (const auto& x : xs) c += x;
  return c / static_cast<double>(xs.size());
}

double signed_area_2d(const std::vector<Vec3>& xs) {
  double a = 0.0;
  const std::size_t n = xs.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = xs[i];
    const auto& q = xs[(i + 1) % n];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

double signed_volume_3d(const Mesh& mesh, std::size_t e, const Vec3& c) {
  double vol = 0.0;
  for (const auto& face : mesh.element(e).faces) {
    const auto xs = gather(mesh, face);
    vol += (mean(xs) - c).dot(area_vector(xs)) / 3.0;
  }
  return vol;
}

}  // namespace

double element_measure(const Mesh& mesh, std::size_t e) {
  const double m = mesh.dim() == 2 ? signed_area_2d(element_coords(mesh, e))
                                   : signed_volume_3d(mesh, e, element_centroid(mesh, e));
  const double d = element_diameter(mesh, e);
  if (!(m > 1e-14 * std::pow(d, mesh.dim()))) {
    throw GeometryError("element " + std::to_string(e + 1) + " has non-positive measure " + std::to_string(m));
  }
  return m;
}

Vec3 element_centroid(const Mesh& mesh, std::size_t e) { return mean(element_coords(mesh, e)); }

double element_diameter(const Mesh& mesh, std::size_t e) {
  const auto xs = element_coords(mesh, e);
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) d = std::max(d, (xs[i] - xs[j]).norm());
  }
  return d;
}

double mesh_measure(const Mesh& mesh) {
  double total = 0.0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) total += element_measure(mesh, e);
  return total;
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(), [kind](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& v : violations) os << "element " << v.element + 1 << ": " << v.message << '\n';
  return os.str();
}

namespace {

constexpr double kAngleTol = 1e-10;

void check_polygon(const Mesh& mesh, std::size_t e, std::vector<Violation>& out) {
  const auto xs = element_coords(mesh, e);
  const std::size_t n = xs.size();
  if (n < 3) {
    out.push_back({ViolationKind::degenerate, e, "polygon with fewer than 3 vertices"});
    return;
  }
  const double area = signed_area_2d(xs);
  const double d = element_diameter(mesh, e);
  if (std::abs(area) <= 1e-14 * d * d) {
    out.push_back({ViolationKind::degenerate, e, "zero-area polygon"});
    return;
  }
  if (area < 0.0) {
    out.push_back({ViolationKind::orientation, e, "vertices are ordered clockwise"});
    return;
  }
  double turning = 0.0;
  bool convex = true;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 a = xs[i] - xs[(i + n - 1) % n];
    const Vec3 b = xs[(i + 1) % n] - xs[i];
    const double la = a.norm();
    const double lb = b.norm();
    if (la <= 1e-14 * d || lb <= 1e-14 * d) {
      out.push_back({ViolationKind::degenerate, e, "coincident consecutive vertices"});
      return;
    }
    const double cross = a.x() * b.y() - a.y() * b.x();
    if (cross < -kAngleTol * la * lb) convex = false;
    turning += std::atan2(cross, a.dot(b));
  }
  if (!convex || std::abs(turning - 2.0 * std::numbers::pi) > 1e-6) {
    out.push_back({ViolationKind::convexity, e, "polygon is not simple and convex"});
  }
}

void check_polyhedron(const Mesh& mesh, std::size_t e, std::vector<Violation>& out) {
  const auto& el = mesh.element(e);
  const double d = element_diameter(mesh, e);
  const Vec3 c = element_centroid(mesh, e);
  const std::set<int> verts(el.vertices.begin(), el.vertices.end());

  std::map<std::pair<int, int>, int> directed;
  std::set<int> used;
  for (std::size_t f = 0; f < el.faces.size(); ++f) {
    const auto& face = el.faces[f];
    if (face.size() < 3) {
      out.push_back({ViolationKind::degenerate, e, "face with fewer than 3 vertices"});
      return;
    }
    for (std::size_t i = 0; i < face.size(); ++i) {
      if (!verts.count(face[i])) {
        out.push_back({ViolationKind::manifold, e, "face references a node outside the element"});
        return;
      }
      used.insert(face[i]);
      ++directed[{face[i], face[(i + 1) % face.size()]}];
    }
    const auto xs = gather(mesh, face);
    const Vec3 av = area_vector(xs);
    if (av.norm() <= 1e-14 * d * d) {
      out.push_back({ViolationKind::degenerate, e, "zero-area face " + std::to_string(f + 1)});
      continue;
    }
    const Vec3 n = av.normalized();
    const Vec3 p = mean(xs);
    double dev = 0.0;
    for (const auto& x : xs) dev = std::max(dev, std::abs((x - p).dot(n)));
    if (dev >= 1e-9 * d) out.push_back({ViolationKind::planarity, e, "face " + std::to_string(f + 1) + " is not planar"});
    if ((p - c).dot(av) <= 0.0) {
      out.push_back({ViolationKind::orientation, e, "face " + std::to_string(f + 1) + " normal points inward"});
    }
    for (int v : el.vertices) {
      if ((mesh.node(v) - p).dot(n) > 1e-9 * d) {
        out.push_back({ViolationKind::convexity, e, "vertex outside the plane of face " + std::to_string(f + 1)});
        break;
      }
    }
  }
  std::size_t edges = 0;
  for (const auto& [edge, count] : directed) {
    const auto rev = directed.find({edge.second, edge.first});
    if (count != 1 || rev == directed.end() || rev->second != 1) {
      out.push_back({ViolationKind::manifold, e, "boundary is not a closed oriented 2-manifold"});
      return;
    }
    ++edges;
  }
  edges /= 2;
  const long euler = static_cast<long>(used.size()) - static_cast<long>(edges) + static_cast<long>(el.faces.size());
  if (euler != 2 || used.size() != verts.size()) {
    out.push_back({ViolationKind::manifold, e, "Euler characteristic " + std::to_string(euler) + " != 2"});
  }
}

}  // namespace

ValidationReport validate_mesh(const Mesh& mesh) {
  ValidationReport report;
  const int nn = static_cast<int>(mesh.node_count());
  std::map<std::vector<int>, std::size_t> seen;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const auto& el = mesh.element(e);
    bool dangling = false;
    for (int v : el.vertices) dangling |= (v < 0 || v >= nn);
    for (const auto& f : el.faces) {
      for (int v : f) dangling |= (v < 0 || v >= nn);
    }
    if (dangling) {
      report.violations.push_back({ViolationKind::dangling_node, e, "references a node that does not exist"});
      continue;
    }
    auto key = el.vertices;
    std::sort(key.begin(), key.end());
    if (std::adjacent_find(key.begin(), key.end()) != key.end()) {
      report.violations.push_back({ViolationKind::degenerate, e, "repeated vertex"});
      continue;
    }
    if (auto [it, fresh] = seen.emplace(key, e); !fresh) {
      report.violations.push_back(
          {ViolationKind::duplicate, e, "same vertex set as element " + std::to_string(it->second + 1)});
    }
    if (mesh.dim() == 2) {
      check_polygon(mesh, e, report.violations);
    } else {
      check_polyhedron(mesh, e, report.violations);
    }
  }
  return report;
}

}  // namespace sfem
