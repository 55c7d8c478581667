#include "sfem/wachspress.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "sfem/error.hpp"

namespace sfem {

namespace {

constexpr double kOnFacetTol = 1e-12;

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

template <class V>
double max_distance(const std::vector<V>& xs) {
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) d = std::max(d, (xs[i] - xs[j]).norm());
  }
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------

Wachspress2d::Wachspress2d(std::vector<Eigen::Vector2d> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw GeometryError("Wachspress polygon needs at least 3 vertices");
  diameter_ = max_distance(vertices_);
  normals_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d e = vertices_[(i + 1) % n] - vertices_[i];
    if (e.norm() <= 1e-14 * diameter_) throw GeometryError("Wachspress polygon has a zero-length edge");
    normals_[i] = Eigen::Vector2d(e.y(), -e.x()).normalized();
  }
  corner_det_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    corner_det_[i] = cross2(normals_[(i + n - 1) % n], normals_[i]);
    if (corner_det_[i] < -1e-12) throw GeometryError("Wachspress polygon is not convex and counterclockwise");
  }
}

std::vector<double> Wachspress2d::distances(const Eigen::Vector2d& x) const {
  std::vector<double> h(vertices_.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = (vertices_[i] - x).dot(normals_[i]);
  return h;
}

Eigen::VectorXd Wachspress2d::values(const Eigen::Vector2d& x) const {
  const std::size_t n = vertices_.size();
  const auto h = distances(x);
  const auto closest = std::min_element(h.begin(), h.end());
  const double tol = kOnFacetTol * diameter_;
  if (*closest < -tol) throw GeometryError("point lies outside the Wachspress polygon");

  Eigen::VectorXd phi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  if (*closest <= tol) {
    // on edge i: linear trace between its endpoints
    const std::size_t i = static_cast<std::size_t>(closest - h.begin());
    const std::size_t j = (i + 1) % n;
    const Eigen::Vector2d e = vertices_[j] - vertices_[i];
    const double t = std::clamp((x - vertices_[i]).dot(e) / e.squaredNorm(), 0.0, 1.0);
    phi[static_cast<Eigen::Index>(i)] = 1.0 - t;
    phi[static_cast<Eigen::Index>(j)] = t;
    return phi;
  }
  for (std::size_t i = 0; i < n; ++i) phi[static_cast<Eigen::Index>(i)] = corner_det_[i] / (h[(i + n - 1) % n] * h[i]);
  return phi / phi.sum();
}

BasisEval Wachspress2d::evaluate_with_gradients(const Eigen::Vector2d& x) const {
  const std::size_t n = vertices_.size();
  const auto h = distances(x);
  if (*std::min_element(h.begin(), h.end()) <= kOnFacetTol * diameter_) {
    throw GeometryError("Wachspress gradients requested on or outside the polygon boundary");
  }
  BasisEval out;
  out.values.resize(static_cast<Eigen::Index>(n));
  Eigen::MatrixXd r(static_cast<Eigen::Index>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = (i + n - 1) % n;
    out.values[static_cast<Eigen::Index>(i)] = corner_det_[i] / (h[prev] * h[i]);
    r.row(static_cast<Eigen::Index>(i)) = (normals_[prev] / h[prev] + normals_[i] / h[i]).transpose();
  }
  out.values /= out.values.sum();
  const Eigen::RowVector2d mean_r = out.values.transpose() * r;
  out.gradients = out.values.asDiagonal() * (r.rowwise() - mean_r);
  return out;
}

// ---------------------------------------------------------------------------

Wachspress3d::Wachspress3d(std::vector<Vec3> vertices, std::vector<std::vector<int>> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  const std::size_t n = vertices_.size();
  diameter_ = max_distance(vertices_);
  std::vector<std::vector<int>> incident(n);
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    std::vector<Vec3> loop;
    for (int v : faces_[f]) {
      if (v < 0 || static_cast<std::size_t>(v) >= n) throw GeometryError("face references an unknown vertex");
      loop.push_back(vertices_[v]);
      incident[v].push_back(static_cast<int>(f));
    }
    const Vec3 av = area_vector(loop);
    if (av.norm() <= 1e-14 * diameter_ * diameter_) throw GeometryError("polyhedron has a zero-area face");
    const Vec3 normal = av.normalized();
    Vec3 p = Vec3::Zero();
    for (const auto& x : loop) p += x;
    p /= static_cast<double>(loop.size());
    normals_.push_back(normal);
    face_points_.push_back(p);

    FaceFrame frame{p, (loop[1] - loop[0]).normalized(), Vec3::Zero()};
    frame.e1 = (frame.e1 - frame.e1.dot(normal) * normal).normalized();
    frame.e2 = normal.cross(frame.e1);
    std::vector<Eigen::Vector2d> local;
    for (const auto& x : loop) local.emplace_back((x - p).dot(frame.e1), (x - p).dot(frame.e2));
    frames_.push_back(frame);
    face_bases_.emplace_back(std::move(local));
  }
  incident_.resize(n);
  corner_det_.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (incident[v].size() != 3) {
      throw GeometryError("vertex " + std::to_string(v) + " has " + std::to_string(incident[v].size()) +
                          " incident faces; Wachspress coordinates need a simple polyhedron");
    }
    incident_[v] = {incident[v][0], incident[v][1], incident[v][2]};
    Eigen::Matrix3d m;
    m << normals_[incident_[v][0]], normals_[incident_[v][1]], normals_[incident_[v][2]];
    // |det| equals the determinant for the anticlockwise face order around v
    corner_det_[v] = std::abs(m.determinant());
  }
}

std::vector<double> Wachspress3d::distances(const Vec3& x) const {
  std::vector<double> h(faces_.size());
  for (std::size_t f = 0; f < h.size(); ++f) h[f] = (face_points_[f] - x).dot(normals_[f]);
  return h;
}

Eigen::VectorXd Wachspress3d::values(const Vec3& x) const {
  const auto h = distances(x);
  const auto closest = std::min_element(h.begin(), h.end());
  const double tol = kOnFacetTol * diameter_;
  if (*closest < -tol) throw GeometryError("point lies outside the Wachspress polyhedron");

  const auto n = static_cast<Eigen::Index>(vertices_.size());
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
  if (*closest <= tol) {
    const std::size_t f = static_cast<std::size_t>(closest - h.begin());
    const auto& frame = frames_[f];
    const Eigen::Vector2d local((x - frame.origin).dot(frame.e1), (x - frame.origin).dot(frame.e2));
    const Eigen::VectorXd face_phi = face_bases_[f].values(local);
    for (std::size_t k = 0; k < faces_[f].size(); ++k) phi[faces_[f][k]] = face_phi[static_cast<Eigen::Index>(k)];
    return phi;
  }
  for (Eigen::Index v = 0; v < n; ++v) {
    const auto& inc = incident_[v];
    phi[v] = corner_det_[v] / (h[inc[0]] * h[inc[1]] * h[inc[2]]);
  }
  return phi / phi.sum();
}

BasisEval Wachspress3d::evaluate_with_gradients(const Vec3& x) const {
  const auto h = distances(x);
  if (*std::min_element(h.begin(), h.end()) <= kOnFacetTol * diameter_) {
    throw GeometryError("Wachspress gradients requested on or outside the polyhedron boundary");
  }
  const auto n = static_cast<Eigen::Index>(vertices_.size());
  BasisEval out;
  out.values.resize(n);
  Eigen::MatrixXd r(n, 3);
  for (Eigen::Index v = 0; v < n; ++v) {
    const auto& inc = incident_[v];
    out.values[v] = corner_det_[v] / (h[inc[0]] * h[inc[1]] * h[inc[2]]);
    Vec3 rv = Vec3::Zero();
    for (int f : inc) rv += normals_[f] / h[f];
    r.row(v) = rv.transpose();
  }
  out.values /= out.values.sum();
  const Eigen::RowVector3d mean_r = out.values.transpose() * r;
  out.gradients = out.values.asDiagonal() * (r.rowwise() - mean_r);
  return out;
}

// ---------------------------------------------------------------------------

ElementBasis ElementBasis::from_mesh(const Mesh& mesh, std::size_t e) {
  const auto& el = mesh.element(e);
  if (mesh.dim() == 2) {
    std::vector<Eigen::Vector2d> xs;
    for (int v : el.vertices) xs.push_back(mesh.node(v).head<2>());
    return ElementBasis(2, Wachspress2d(std::move(xs)));
  }
  std::map<int, int> local;
  std::vector<Vec3> xs;
  for (std::size_t i = 0; i < el.vertices.size(); ++i) {
    local[el.vertices[i]] = static_cast<int>(i);
    xs.push_back(mesh.node(el.vertices[i]));
  }
  std::vector<std::vector<int>> faces;
  for (const auto& f : el.faces) {
    std::vector<int> loop;
    for (int v : f) loop.push_back(local.at(v));
    faces.push_back(std::move(loop));
  }
  return ElementBasis(3, Wachspress3d(std::move(xs), std::move(faces)));
}

std::size_t ElementBasis::size() const {
  return std::visit([](const auto& b) { return b.size(); }, impl_);
}

double ElementBasis::diameter() const {
  return std::visit([](const auto& b) { return b.diameter(); }, impl_);
}

Eigen::VectorXd ElementBasis::values(const Vec3& x) const {
  if (dim_ == 2) return std::get<Wachspress2d>(impl_).values(x.head<2>());
  return std::get<Wachspress3d>(impl_).values(x);
}

BasisEval ElementBasis::evaluate_with_gradients(const Vec3& x) const {
  if (dim_ == 2) return std::get<Wachspress2d>(impl_).evaluate_with_gradients(x.head<2>());
  return std::get<Wachspress3d>(impl_).evaluate_with_gradients(x);
}

BasisEval shape_2d(const std::vector<Eigen::Vector2d>& polygon, const Eigen::Vector2d& x) {
  return {Wachspress2d(polygon).values(x), {}};
}

BasisEval shape_3d(const std::vector<Vec3>& vertices, const std::vector<std::vector<int>>& faces, const Vec3& x) {
  return {Wachspress3d(vertices, faces).values(x), {}};
}

BasisEval grad_shape(const ElementBasis& basis, const Vec3& x) { return basis.evaluate_with_gradients(x); }

}  // namespace sfem
