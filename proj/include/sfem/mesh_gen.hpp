#pragma once

#include <cstdint>

#include "sfem/mesh.hpp"

namespace sfem {

/// Benchmark domain shapes. `origin` is the lower corner; the quarter plate
/// occupies [0, side]^2 minus the disc of radius `hole_radius` centred at the
/// origin.
struct DomainGeometry {
  enum class Kind { rectangle, quarter_plate_with_hole, box };

  Kind kind = Kind::rectangle;
  Vec3 origin = Vec3::Zero();
  Vec3 extents = Vec3::Zero();
  double hole_radius = 0.0;

  static DomainGeometry rectangle(double length, double depth, double x0 = 0.0, double y0 = 0.0);
  static DomainGeometry quarter_plate_with_hole(double radius, double side);
  static DomainGeometry box(const Vec3& extents, const Vec3& origin = Vec3::Zero());

  int dim() const noexcept { return kind == Kind::box ? 3 : 2; }
  /// Exact measure of the continuous domain.
  double measure() const;
  /// Throws InputError when a length is non-positive or the hole does not fit.
  void check() const;
  bool operator==(const DomainGeometry&) const = default;
};

/// Clipped Voronoi tessellation of a rectangle or quarter plate from
/// `n_elements` seeds, regularised by a fixed number of Lloyd iterations.
/// A pure function of its arguments. The circular hole is resolved by
/// mirroring seeds near it across the circle, so every cell stays convex.
Mesh voronoi_mesh(const DomainGeometry& domain, int n_elements, int lloyd_iterations, std::uint64_t rng_seed);

/// Measure of the polygonal domain actually covered by a mesh generated for
/// `domain`, computed from boundary node positions only (independent of the
/// element areas). Equals domain.measure() for rectangles.
double discrete_domain_measure(const DomainGeometry& domain, const Mesh& mesh);

/// Sweeps every polygon into `layers` prisms along z. Lateral faces are
/// quadrilaterals; bottom and top faces are copies of the polygon.
Mesh extrude_mesh(const Mesh& mesh2d, int layers, double height, double z0 = 0.0);

/// Voronoi mesh of the box's xy-rectangle extruded over its z extent.
Mesh polyhedral_box_mesh(const DomainGeometry& box, int n_base_elements, int layers, int lloyd_iterations,
                         std::uint64_t rng_seed);

}  // namespace sfem
