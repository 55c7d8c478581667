#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sfem/elasticity.hpp"
#include "sfem/mesh.hpp"
#include "sfem/mesh_gen.hpp"
#include "sfem/system.hpp"

namespace sfem {

enum class Benchmark { patch, cantilever2d, plate_hole, cube_body, cantilever3d };

std::string to_string(Benchmark b);
/// Throws InputError for an unknown name.
Benchmark parse_benchmark(const std::string& name);

/// Closed-form displacement and stress (Voigt) fields with the body force
/// that keeps them in equilibrium.
struct AnalyticalSolution {
  Benchmark kind = Benchmark::patch;
  int dim = 2;
  Material material;
  std::function<Vec3(const Vec3&)> displacement;
  std::function<Eigen::VectorXd(const Vec3&)> stress;
  VectorField body_force;  // empty when there is none
  Eigen::MatrixXd compliance;  // inverse of d_matrix(material)

  /// Engineering strain from the stress through the compliance.
  Eigen::VectorXd strain(const Vec3& x) const;
};

struct Cantilever2dParams {
  double L = 8.0;
  double D = 4.0;
  double P = 250.0;
  double E = 3e7;
  double nu = 0.3;
};

struct PlateHoleParams {
  double a = 1.0;
  double side = 5.0;
  double E = 1000.0;
  double nu = 0.3;
  double sigma = 1.0;
};

struct CubeBodyParams {
  double E = 1.0;
  double nu = 0.3;
};

struct Cantilever3dParams {
  double a = 1.0;
  double b = 1.0;
  double L = 5.0;
  double F = 1.0;
  double E = 1.0;
  double nu = 0.3;
  int terms = 50;
};

/// Affine field u = c + A x (2D: the classical patch field) with no body force.
AnalyticalSolution affine_exact(int dim, const Material& material);
AnalyticalSolution cantilever2d_exact(const Cantilever2dParams& p = {});
/// Kirsch solution around a hole of radius a centred at the origin. Fields
/// throw InputError for points deeper than 5% of a inside the hole.
AnalyticalSolution plate_hole_exact(const PlateHoleParams& p = {});
/// Quadratic field with constant body force. Throws InputError if the body
/// force fails the equilibrium self-check at 100 random points.
AnalyticalSolution cube_body_exact(const CubeBodyParams& p = {});
AnalyticalSolution cantilever3d_exact(const Cantilever3dParams& p = {});

/// Largest relative mismatch between strain() and the finite-difference
/// symmetric gradient of displacement() at `samples` random points of the box.
double strain_consistency(const AnalyticalSolution& s, const Vec3& lo, const Vec3& hi, int samples,
                          std::uint64_t seed);
/// Largest mismatch between b and -div(stress), relative to max(|b|, |stress| scale).
double equilibrium_consistency(const AnalyticalSolution& s, const Vec3& lo, const Vec3& hi, int samples,
                               std::uint64_t seed);

/// Relative L2 error of the Wachspress interpolant of u against `exact`,
/// integrated on element sub-simplices with a rule of the given degree.
double l2_error(const Mesh& mesh, const Eigen::VectorXd& u, const std::function<Vec3(const Vec3&)>& exact,
                int degree = 6);

/// Relative energy-norm error of recovered strains.
double h1_energy_error(const SolutionField& field, const std::vector<Material>& materials,
                       const std::function<Eigen::VectorXd(const Vec3&)>& exact_strain);

struct RateFit {
  double slope = 0.0;
  bool monotone = true;  // false when some error failed to decrease
};

/// Least-squares slope of log(error) against log(h). Needs >= 2 points
/// (>= 3 for a meaningful fit); throws InputError for non-positive data.
RateFit convergence_rate(const std::vector<double>& h, const std::vector<double>& errors);

DomainGeometry benchmark_domain(Benchmark b);
AnalyticalSolution benchmark_solution(Benchmark b, int dim = 2);

/// Refinement ladder level -> mesh. 2D: {100, 200, 400, 800} Voronoi cells;
/// cube_body: 2k^2 cells x k layers, k = 4, 6, 8, 10; cantilever3d: 4k^2
/// cells x 5k layers, k = 2, 3, 4, 5.
struct LadderOptions {
  int lloyd_iterations = 30;
  std::uint64_t seed = 42;
};
int ladder_size(Benchmark b);
Mesh benchmark_mesh(Benchmark b, int level, const LadderOptions& options = {});

/// Problem with the benchmark's materials, loads and boundary conditions
/// placed on `mesh` by geometry.
Problem make_benchmark_problem(Benchmark b, const Mesh& mesh, Method method, const AssemblyOptions& assembly = {});

struct LevelResult {
  int level = 0;
  std::size_t elements = 0;
  std::size_t ndof = 0;
  double h = 0.0;
  double l2 = 0.0;
  double h1 = 0.0;
  std::size_t integration_points = 0;
  double relative_residual = 0.0;
  double seconds = 0.0;
};

struct RunOptions {
  AssemblyOptions assembly;
  SolverOptions solver;
  Execution exec = Execution::parallel;
  LadderOptions ladder;
};

/// Assemble, solve and measure errors for one mesh.
LevelResult run_benchmark(Benchmark b, const Mesh& mesh, Method method, const RunOptions& options = {},
                          SolveReport* report = nullptr, SolutionField* field = nullptr);

struct ConvergenceReport {
  Benchmark problem = Benchmark::patch;
  Method method = Method::csfem;
  std::vector<LevelResult> levels;
  RateFit l2_rate;
  RateFit h1_rate;
};

ConvergenceReport run_convergence(Benchmark b, Method method, int levels, const RunOptions& options = {});

/// Columns `method,problem,level,ndof,h,L2,H1`; rows in the given order.
std::string convergence_csv(const std::vector<ConvergenceReport>& reports);
std::string convergence_csv_header();
std::string convergence_csv_row(const ConvergenceReport& report, const LevelResult& level);

/// Log-log plot of error against h with fitted slopes in the legend.
std::string convergence_svg(const std::vector<ConvergenceReport>& reports);

}  // namespace sfem
