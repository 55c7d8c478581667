#include "sfem/benchmarks.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <cmath>
#include <numbers>
#include <random>

#include "parallel.hpp"
#include "sfem/error.hpp"
#include "sfem/quadrature.hpp"
#include "sfem/wachspress.hpp"

namespace sfem {

namespace {

constexpr double kPi = std::numbers::pi;

AnalyticalSolution finish(AnalyticalSolution s) {
  s.material.check();
  s.compliance = d_matrix(s.material).inverse();
  return s;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

std::string to_string(Benchmark b) {
  switch (b) {
    case Benchmark::patch: return "patch";
    case Benchmark::cantilever2d: return "cantilever2d";
    case Benchmark::plate_hole: return "plate_hole";
    case Benchmark::cube_body: return "cube_body";
    case Benchmark::cantilever3d: return "cantilever3d";
  }
  return "unknown";
}

Benchmark parse_benchmark(const std::string& name) {
  for (auto b : {Benchmark::patch, Benchmark::cantilever2d, Benchmark::plate_hole, Benchmark::cube_body,
                 Benchmark::cantilever3d}) {
    if (to_string(b) == name) return b;
  }
  throw InputError("unknown problem '" + name +
                   "' (expected patch, cantilever2d, plate_hole, cube_body or cantilever3d)");
}

Eigen::VectorXd AnalyticalSolution::strain(const Vec3& x) const { return compliance * stress(x); }

AnalyticalSolution affine_exact(int dim, const Material& material) {
  AnalyticalSolution s;
  s.kind = Benchmark::patch;
  s.dim = dim;
  s.material = material;
  const Eigen::MatrixXd d = d_matrix(material);
  if (dim == 2) {
    s.displacement = [](const Vec3& x) {
      return Vec3(0.1 + 0.2 * x.x() + 0.3 * x.y(), 0.05 - 0.1 * x.x() + 0.2 * x.y(), 0.0);
    };
    const Eigen::VectorXd sig = d * vec({0.2, 0.2, 0.2});
    s.stress = [sig](const Vec3&) { return sig; };
  } else {
    s.displacement = [](const Vec3& x) {
      return Vec3(0.1 + 0.2 * x.x() + 0.3 * x.y() - 0.1 * x.z(), 0.05 - 0.1 * x.x() + 0.2 * x.y() + 0.3 * x.z(),
                  0.02 + 0.02 * x.x() - 0.1 * x.y() + 0.4 * x.z());
    };
    const Eigen::VectorXd sig = d * vec({0.2, 0.2, 0.4, 0.2, 0.2, -0.08});
    s.stress = [sig](const Vec3&) { return sig; };
  }
  return finish(std::move(s));
}

AnalyticalSolution cantilever2d_exact(const Cantilever2dParams& p) {
  AnalyticalSolution s;
  s.kind = Benchmark::cantilever2d;
  s.dim = 2;
  s.material = {p.E, p.nu, StressState::plane_stress};
  const double I = p.D * p.D * p.D / 12.0;
  s.displacement = [p, I](const Vec3& x) {
    const double X = x.x();
    const double Y = x.y();
    const double c = p.P / (6.0 * p.E * I);
    const double u = c * Y * ((6.0 * p.L - 3.0 * X) * X + (2.0 + p.nu) * (Y * Y - p.D * p.D / 4.0));
    const double v = -c * (3.0 * p.nu * Y * Y * (p.L - X) + (4.0 + 5.0 * p.nu) * p.D * p.D * X / 4.0 +
                           (3.0 * p.L - X) * X * X);
    return Vec3(u, v, 0.0);
  };
  s.stress = [p, I](const Vec3& x) {
    const double Y = x.y();
    return vec({p.P * (p.L - x.x()) * Y / I, 0.0, -p.P / (2.0 * I) * (p.D * p.D / 4.0 - Y * Y)});
  };
  return finish(std::move(s));
}

namespace {

void check_outside_hole(const Vec3& x, double a) {
  if (std::hypot(x.x(), x.y()) < 0.95 * a) throw InputError("Kirsch solution evaluated inside the hole");
}

}  // namespace

AnalyticalSolution plate_hole_exact(const PlateHoleParams& p) {
  AnalyticalSolution s;
  s.kind = Benchmark::plate_hole;
  s.dim = 2;
  s.material = {p.E, p.nu, StressState::plane_stress};
  s.displacement = [p](const Vec3& x) {
    check_outside_hole(x, p.a);
    const double r = std::hypot(x.x(), x.y());
    const double t = std::atan2(x.y(), x.x());
    const double mu = p.E / (2.0 * (1.0 + p.nu));
    const double k = (3.0 - p.nu) / (1.0 + p.nu);
    const double a = p.a;
    const double c = p.sigma * a / (8.0 * mu);
    const double ar = a / r;
    const double ux = c * (r / a * (k + 1.0) * std::cos(t) + 2.0 * ar * ((1.0 + k) * std::cos(t) + std::cos(3.0 * t)) -
                           2.0 * ar * ar * ar * std::cos(3.0 * t));
    const double uy = c * (r / a * (k - 3.0) * std::sin(t) + 2.0 * ar * ((1.0 - k) * std::sin(t) + std::sin(3.0 * t)) -
                           2.0 * ar * ar * ar * std::sin(3.0 * t));
    return Vec3(ux, uy, 0.0);
  };
  s.stress = [p](const Vec3& x) {
    check_outside_hole(x, p.a);
    const double r2 = x.x() * x.x() + x.y() * x.y();
    const double t = std::atan2(x.y(), x.x());
    const double q2 = p.a * p.a / r2;
    const double q4 = q2 * q2;
    const double c2 = std::cos(2.0 * t), c4 = std::cos(4.0 * t), s2 = std::sin(2.0 * t), s4 = std::sin(4.0 * t);
    return vec({p.sigma * (1.0 - q2 * (1.5 * c2 + c4) + 1.5 * q4 * c4), p.sigma * (-q2 * (0.5 * c2 - c4) - 1.5 * q4 * c4),
                p.sigma * (-q2 * (0.5 * s2 + s4) + 1.5 * q4 * s4)});
  };
  return finish(std::move(s));
}

namespace {

// Coefficients of the quadratic cube field per component, in the monomial
// order 1, x, y, z, x^2, y^2, z^2, xy, yz, zx.
constexpr double kCube[3][10] = {
    {0.1, 0.2, 0.2, 0.1, 0.15, 0.2, 0.1, 0.15, 0.1, 0.1},
    {0.15, 0.1, 0.1, 0.2, 0.2, 0.15, 0.1, 0.2, 0.1, 0.2},
    {0.15, 0.15, 0.2, 0.1, 0.15, 0.1, 0.2, 0.1, 0.2, 0.15},
};

Eigen::Matrix3d cube_gradient(const Vec3& p) {
  const double x = p.x(), y = p.y(), z = p.z();
  Eigen::Matrix3d g;
  for (int i = 0; i < 3; ++i) {
    const auto& c = kCube[i];
    g(i, 0) = c[1] + 2.0 * c[4] * x + c[7] * y + c[9] * z;
    g(i, 1) = c[2] + 2.0 * c[5] * y + c[7] * x + c[8] * z;
    g(i, 2) = c[3] + 2.0 * c[6] * z + c[8] * y + c[9] * x;
  }
  return g;
}

Vec3 random_point(std::mt19937_64& rng, const Vec3& lo, const Vec3& hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec3 x;
  for (int k = 0; k < 3; ++k) x[k] = lo[k] + u(rng) * (hi[k] - lo[k]);
  return x;
}

}  // namespace

AnalyticalSolution cube_body_exact(const CubeBodyParams& p) {
  AnalyticalSolution s;
  s.kind = Benchmark::cube_body;
  s.dim = 3;
  s.material = {p.E, p.nu, StressState::solid};
  s.displacement = [](const Vec3& q) {
    const double m[10] = {1.0, q.x(), q.y(), q.z(), q.x() * q.x(), q.y() * q.y(), q.z() * q.z(), q.x() * q.y(),
                          q.y() * q.z(), q.z() * q.x()};
    Vec3 u = Vec3::Zero();
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 10; ++k) u[i] += kCube[i][k] * m[k];
    }
    return u;
  };
  const Eigen::MatrixXd C = d_matrix(s.material);
  s.stress = [C](const Vec3& q) {
    const Eigen::Matrix3d g = cube_gradient(q);
    const Eigen::VectorXd eps = vec({g(0, 0), g(1, 1), g(2, 2), g(0, 1) + g(1, 0), g(1, 2) + g(2, 1), g(2, 0) + g(0, 2)});
    return Eigen::VectorXd(C * eps);
  };
  // C(i,j) 1-based; shear moduli C(4,4) = C(5,5) = C(6,6) for isotropy.
  auto c = [&C](int i, int j) { return C(i - 1, j - 1); };
  const Vec3 b(-0.3 * c(1, 1) - 0.2 * c(1, 2) - 0.15 * c(1, 3) - 0.6 * c(4, 4) - 0.35 * c(6, 6),
               -0.15 * c(1, 2) - 0.3 * c(2, 2) - 0.2 * c(2, 3) - 0.55 * c(4, 4) - 0.4 * c(5, 5),
               -0.1 * c(1, 3) - 0.1 * c(2, 3) - 0.4 * c(3, 3) - 0.3 * c(5, 5) - 0.4 * c(6, 6));
  s.body_force = [b](const Vec3&) { return b; };
  s = finish(std::move(s));
  const double mismatch = equilibrium_consistency(s, Vec3(0, -1, 0), Vec3(1, 1, 1), 100, 2024);
  if (!(mismatch < 1e-8)) {
    throw InputError("cube body force is not in equilibrium with the displacement field (mismatch " +
                     std::to_string(mismatch) + ")");
  }
  return s;
}

AnalyticalSolution cantilever3d_exact(const Cantilever3dParams& p) {
  if (p.terms < 1) throw InputError("series needs at least one term");
  AnalyticalSolution s;
  s.kind = Benchmark::cantilever3d;
  s.dim = 3;
  s.material = {p.E, p.nu, StressState::solid};
  const double I = 4.0 * p.a * p.b * p.b * p.b / 3.0;
  // Per-term wavenumber and (-1)^n / cosh(k b), shared by both fields.
  auto k = std::make_shared<std::vector<double>>();
  auto w = std::make_shared<std::vector<double>>();
  for (int n = 1; n <= p.terms; ++n) {
    k->push_back(n * kPi / p.a);
    w->push_back((n % 2 == 0 ? 1.0 : -1.0) / std::cosh(k->back() * p.b));
  }
  s.stress = [p, I, k, w](const Vec3& q) {
    const double x = q.x(), y = q.y(), z = q.z();
    double sxz = 0.0;
    double syz_series = 0.0;
    for (int n = 1; n <= p.terms; ++n) {
      const double kn = (*k)[n - 1];
      const double c = (*w)[n - 1] / (static_cast<double>(n) * n);
      sxz += c * std::sin(kn * x) * std::sinh(kn * y);
      syz_series += c * std::cos(kn * x) * std::cosh(kn * y);
    }
    sxz *= 2.0 * p.a * p.a * p.nu * p.F / (kPi * kPi * I * (1.0 + p.nu));
    const double syz = (p.b * p.b - y * y) * p.F / (2.0 * I) +
                       p.nu * p.F / (I * (1.0 + p.nu)) *
                           ((3.0 * x * x - p.a * p.a) / 6.0 - 2.0 * p.a * p.a / (kPi * kPi) * syz_series);
    return vec({0.0, 0.0, p.F * y * z / I, 0.0, syz, sxz});
  };
  s.displacement = [p, I, k, w](const Vec3& q) {
    const double x = q.x(), y = q.y(), z = q.z();
    const double c = p.F / (p.E * I);
    double series = 0.0;
    for (int n = 1; n <= p.terms; ++n) {
      const double kn = (*k)[n - 1];
      series += (*w)[n - 1] / (static_cast<double>(n) * n * n) * std::cos(kn * x) * std::sinh(kn * y);
    }
    const double u = -p.nu * c * x * y * z;
    const double v = c * (p.nu * (x * x - y * y) * z / 2.0 - z * z * z / 6.0);
    const double wz = c * (y * (p.nu * x * x + z * z) / 2.0 + p.nu * y * y * y / 6.0 +
                           (1.0 + p.nu) * (p.b * p.b * y - y * y * y / 3.0) - p.nu * p.a * p.a * y / 3.0 -
                           4.0 * p.nu * p.a * p.a * p.a / (kPi * kPi * kPi) * series);
    return Vec3(u, v, wz);
  };
  return finish(std::move(s));
}

double strain_consistency(const AnalyticalSolution& s, const Vec3& lo, const Vec3& hi, int samples,
                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double step = 1e-5 * (hi - lo).norm();
  double worst = 0.0;
  double scale = 0.0;
  int accepted = 0;
  for (int attempt = 0; accepted < samples && attempt < 100 * samples; ++attempt) {
    const Vec3 x = random_point(rng, lo, hi);
    Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
    Eigen::VectorXd eps;
    try {
      eps = s.strain(x);
      for (int j = 0; j < s.dim; ++j) {
        Vec3 dx = Vec3::Zero();
        dx[j] = step;
        g.col(j) = (s.displacement(x + dx) - s.displacement(x - dx)) / (2.0 * step);
      }
    } catch (const InputError&) {
      continue;  // outside the solution's domain
    }
    ++accepted;
    Eigen::VectorXd fd = s.dim == 2 ? vec({g(0, 0), g(1, 1), g(0, 1) + g(1, 0)})
                                    : vec({g(0, 0), g(1, 1), g(2, 2), g(0, 1) + g(1, 0), g(1, 2) + g(2, 1),
                                           g(2, 0) + g(0, 2)});
    worst = std::max(worst, (fd - eps).cwiseAbs().maxCoeff());
    scale = std::max(scale, eps.cwiseAbs().maxCoeff());
  }
  if (accepted < samples) throw InputError("too few sample points inside the solution's domain");
  return scale > 0.0 ? worst / scale : worst;
}

double equilibrium_consistency(const AnalyticalSolution& s, const Vec3& lo, const Vec3& hi, int samples,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double length = (hi - lo).norm();
  const double step = 1e-4 * length;
  // Voigt index of sigma_ij.
  const int v2[2][2] = {{0, 2}, {2, 1}};
  const int v3[3][3] = {{0, 3, 5}, {3, 1, 4}, {5, 4, 2}};
  double worst = 0.0;
  double scale = 0.0;
  int accepted = 0;
  for (int attempt = 0; accepted < samples && attempt < 100 * samples; ++attempt) {
    const Vec3 x = random_point(rng, lo, hi);
    Vec3 div = Vec3::Zero();
    Vec3 b = Vec3::Zero();
    try {
      for (int j = 0; j < s.dim; ++j) {
        Vec3 dx = Vec3::Zero();
        dx[j] = step;
        const Eigen::VectorXd ds = (s.stress(x + dx) - s.stress(x - dx)) / (2.0 * step);
        for (int i = 0; i < s.dim; ++i) div[i] += ds[s.dim == 2 ? v2[i][j] : v3[i][j]];
      }
      if (s.body_force) b = s.body_force(x);
      scale = std::max({scale, b.cwiseAbs().maxCoeff(), s.stress(x).cwiseAbs().maxCoeff() / length});
    } catch (const InputError&) {
      continue;
    }
    ++accepted;
    worst = std::max(worst, (div + b).cwiseAbs().maxCoeff());
  }
  if (accepted < samples) throw InputError("too few sample points inside the solution's domain");
  return scale > 0.0 ? worst / scale : worst;
}

double l2_error(const Mesh& mesh, const Eigen::VectorXd& u, const std::function<Vec3(const Vec3&)>& exact,
                int degree) {
  const int dim = mesh.dim();
  if (u.size() != static_cast<Eigen::Index>(dim * mesh.node_count())) {
    throw InputError("displacement vector has the wrong length");
  }
  const auto& rule = dim == 2 ? triangle_rule(degree) : tetrahedron_rule(degree);
  const std::size_t ne = mesh.element_count();
  std::vector<double> num(ne, 0.0), den(ne, 0.0);
  detail::for_each_index(ne, Execution::parallel, [&](std::size_t e) {
    const auto basis = ElementBasis::from_mesh(mesh, e);
    const Eigen::VectorXd ue = element_dofs(mesh, e, u);
    for (const auto& s : sub_simplices(mesh, e)) {
      for (const auto& q : rule) {
        const Vec3 x = simplex_point(s, q.bary);
        const Eigen::VectorXd phi = basis.values(x);
        Vec3 uh = Vec3::Zero();
        for (Eigen::Index a = 0; a < phi.size(); ++a) {
          for (int i = 0; i < dim; ++i) uh[i] += phi[a] * ue[dim * a + i];
        }
        const Vec3 ux = exact(x);
        const double w = q.weight * s.measure;
        num[e] += w * (uh - ux).head(dim).squaredNorm();
        den[e] += w * ux.head(dim).squaredNorm();
      }
    }
  });
  double n = 0.0, d = 0.0;
  for (std::size_t e = 0; e < ne; ++e) {
    n += num[e];
    d += den[e];
  }
  if (!(d > 0.0)) throw InputError("exact displacement has zero L2 norm; relative error undefined");
  return std::sqrt(n / d);
}

double h1_energy_error(const SolutionField& field, const std::vector<Material>& materials,
                       const std::function<Eigen::VectorXd(const Vec3&)>& exact_strain) {
  std::vector<Eigen::MatrixXd> d(materials.size());
  for (std::size_t e = 0; e < materials.size(); ++e) d[e] = d_matrix(materials[e]);
  const std::size_t n = field.samples.size();
  std::vector<double> num(n, 0.0), den(n, 0.0);
  detail::for_each_index(n, Execution::parallel, [&](std::size_t i) {
    const auto& s = field.samples[i];
    if (s.element >= d.size()) throw InputError("strain sample refers to an element without material");
    const Eigen::VectorXd eps = exact_strain(s.point);
    const Eigen::VectorXd diff = eps - s.strain;
    num[i] = s.weight * diff.dot(d[s.element] * diff);
    den[i] = s.weight * eps.dot(d[s.element] * eps);
  });
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    a += num[i];
    b += den[i];
  }
  if (!(b > 0.0)) throw InputError("exact strain has zero energy; relative error undefined");
  return std::sqrt(std::max(a, 0.0) / b);
}

RateFit convergence_rate(const std::vector<double>& h, const std::vector<double>& errors) {
  if (h.size() != errors.size() || h.size() < 2) throw InputError("rate fit needs matching h/error lists of length >= 2");
  const std::size_t n = h.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(h[i] > 0.0) || !(errors[i] > 0.0)) throw InputError("rate fit needs positive h and errors");
    mx += std::log(h[i]);
    my += std::log(errors[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(h[i]) - mx;
    sxy += dx * (std::log(errors[i]) - my);
    sxx += dx * dx;
  }
  if (!(sxx > 0.0)) throw InputError("rate fit needs distinct mesh sizes");
  RateFit fit{sxy / sxx, true};
  for (std::size_t i = 1; i < n; ++i) fit.monotone = fit.monotone && errors[i] < errors[i - 1];
  return fit;
}

DomainGeometry benchmark_domain(Benchmark b) {
  switch (b) {
    case Benchmark::patch: return DomainGeometry::rectangle(1.0, 1.0);
    case Benchmark::cantilever2d: return DomainGeometry::rectangle(8.0, 4.0, 0.0, -2.0);
    case Benchmark::plate_hole: return DomainGeometry::quarter_plate_with_hole(1.0, 5.0);
    case Benchmark::cube_body: return DomainGeometry::box(Vec3(1.0, 2.0, 1.0), Vec3(0.0, -1.0, 0.0));
    case Benchmark::cantilever3d: return DomainGeometry::box(Vec3(2.0, 2.0, 5.0), Vec3(-1.0, -1.0, 0.0));
  }
  throw InputError("unknown benchmark");
}

AnalyticalSolution benchmark_solution(Benchmark b, int dim) {
  switch (b) {
    case Benchmark::patch:
      return affine_exact(dim, {1.0, 0.3, dim == 2 ? StressState::plane_stress : StressState::solid});
    case Benchmark::cantilever2d: return cantilever2d_exact();
    case Benchmark::plate_hole: return plate_hole_exact();
    case Benchmark::cube_body: return cube_body_exact();
    case Benchmark::cantilever3d: return cantilever3d_exact();
  }
  throw InputError("unknown benchmark");
}

int ladder_size(Benchmark) { return 4; }

Mesh benchmark_mesh(Benchmark b, int level, const LadderOptions& options) {
  if (level < 0 || level >= ladder_size(b)) {
    throw InputError("refinement level " + std::to_string(level) + " is outside the ladder");
  }
  const auto domain = benchmark_domain(b);
  const std::uint64_t seed = options.seed + static_cast<std::uint64_t>(level);
  switch (b) {
    case Benchmark::patch:
    case Benchmark::cantilever2d:
    case Benchmark::plate_hole:
      return voronoi_mesh(domain, 100 << level, options.lloyd_iterations, seed);
    case Benchmark::cube_body: {
      const int k = 4 + 2 * level;
      return polyhedral_box_mesh(domain, 2 * k * k, k, options.lloyd_iterations, seed);
    }
    case Benchmark::cantilever3d: {
      const int k = 2 + level;
      return polyhedral_box_mesh(domain, 4 * k * k, 5 * k, options.lloyd_iterations, seed);
    }
  }
  throw InputError("unknown benchmark");
}

namespace {

Vec3 facet_normal(const Mesh& mesh, std::size_t e, int facet) {
  const auto ids = mesh.facet_nodes(e, facet);
  if (mesh.dim() == 2) {
    const Vec3 t = mesh.node(ids[1]) - mesh.node(ids[0]);
    return Vec3(t.y(), -t.x(), 0.0).normalized();
  }
  std::vector<Vec3> loop;
  for (int v : ids) loop.push_back(mesh.node(v));
  return area_vector(loop).normalized();
}

VectorField traction_of(const AnalyticalSolution& s, const Vec3& n) {
  const auto stress = s.stress;
  const int dim = s.dim;
  return [stress, n, dim](const Vec3& x) {
    const Eigen::VectorXd v = stress(x);
    if (dim == 2) return Vec3(v[0] * n.x() + v[2] * n.y(), v[2] * n.x() + v[1] * n.y(), 0.0);
    return Vec3(v[0] * n.x() + v[3] * n.y() + v[5] * n.z(), v[3] * n.x() + v[1] * n.y() + v[4] * n.z(),
                v[5] * n.x() + v[4] * n.y() + v[2] * n.z());
  };
}

void fix_nodes(Problem& p, const AnalyticalSolution& s, const std::vector<int>& nodes) {
  for (int v : nodes) {
    const Vec3 u = s.displacement(p.mesh.node(v));
    for (int i = 0; i < p.mesh.dim(); ++i) p.loads.dirichlet.push_back({v, i, u[i]});
  }
}

}  // namespace

Problem make_benchmark_problem(Benchmark b, const Mesh& mesh, Method method, const AssemblyOptions& assembly) {
  const auto domain = benchmark_domain(b);
  if (b != Benchmark::patch && mesh.dim() != domain.dim()) {
    throw InputError("problem " + to_string(b) + " needs a " + std::to_string(domain.dim()) + "D mesh");
  }
  const auto exact = benchmark_solution(b, mesh.dim());
  Problem p{mesh, std::vector<Material>(mesh.element_count(), exact.material), method, {}, assembly};
  p.loads.body_force = exact.body_force;
  const double tol = 1e-8 * domain.extents.maxCoeff();

  if (b == Benchmark::patch || b == Benchmark::plate_hole || b == Benchmark::cube_body) {
    fix_nodes(p, exact, mesh.boundary_nodes());
    return p;
  }
  // Cantilevers: exact displacements on the supported end and the exact
  // traction on every other boundary facet (zero on the free faces of the
  // nominal domain).
  const int axis = b == Benchmark::cantilever2d ? 0 : 2;
  const double support = b == Benchmark::cantilever2d ? domain.origin.x() : domain.origin.z() + domain.extents.z();
  auto on_support = [&](int v) { return std::abs(mesh.node(v)[axis] - support) < tol; };
  std::vector<int> fixed;
  for (int v : mesh.boundary_nodes()) {
    if (on_support(v)) fixed.push_back(v);
  }
  for (const auto& ref : mesh.boundary_facets()) {
    const auto ids = mesh.facet_nodes(ref.element, ref.facet);
    if (std::all_of(ids.begin(), ids.end(), on_support)) continue;
    p.loads.tractions.push_back({ref.element, ref.facet, traction_of(exact, facet_normal(mesh, ref.element, ref.facet))});
  }
  if (fixed.empty()) throw InputError("mesh does not reach the supported end of the " + to_string(b) + " domain");
  fix_nodes(p, exact, fixed);
  return p;
}

LevelResult run_benchmark(Benchmark b, const Mesh& mesh, Method method, const RunOptions& options, SolveReport* report,
                          SolutionField* field_out) {
  const auto t0 = std::chrono::steady_clock::now();
  const Problem problem = make_benchmark_problem(b, mesh, method, options.assembly);
  const auto exact = benchmark_solution(b, mesh.dim());
  const auto system = assemble(problem, options.exec);
  auto rep = solve(apply_dirichlet(system, problem.loads.dirichlet), options.solver);
  auto field = recover_fields(problem, rep.u, 6, options.exec);

  LevelResult r;
  r.elements = mesh.element_count();
  r.ndof = static_cast<std::size_t>(system.ndof());
  r.h = std::pow(benchmark_domain(b).measure() / static_cast<double>(mesh.element_count()), 1.0 / mesh.dim());
  if (b == Benchmark::patch && mesh.dim() == 3) r.h = std::pow(mesh_measure(mesh) / r.elements, 1.0 / 3.0);
  r.l2 = l2_error(mesh, rep.u, exact.displacement, 6);
  r.h1 = h1_energy_error(field, problem.materials, [&exact](const Vec3& x) { return exact.strain(x); });
  r.integration_points = system.integration_points;
  r.relative_residual = rep.relative_residual;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (report) *report = std::move(rep);
  if (field_out) *field_out = std::move(field);
  return r;
}

ConvergenceReport run_convergence(Benchmark b, Method method, int levels, const RunOptions& options) {
  if (levels < 1 || levels > ladder_size(b)) {
    throw InputError("level count must be between 1 and " + std::to_string(ladder_size(b)));
  }
  ConvergenceReport rep;
  rep.problem = b;
  rep.method = method;
  for (int level = 0; level < levels; ++level) {
    auto r = run_benchmark(b, benchmark_mesh(b, level, options.ladder), method, options);
    r.level = level;
    rep.levels.push_back(r);
  }
  if (levels >= 2) {
    std::vector<double> h, l2, h1;
    for (const auto& r : rep.levels) {
      h.push_back(r.h);
      l2.push_back(r.l2);
      h1.push_back(r.h1);
    }
    rep.l2_rate = convergence_rate(h, l2);
    rep.h1_rate = convergence_rate(h, h1);
  }
  return rep;
}

}  // namespace sfem
