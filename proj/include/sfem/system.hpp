#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "sfem/elasticity.hpp"
#include "sfem/mesh.hpp"
#include "sfem/smoothing.hpp"

namespace sfem {

/// Prescribed value of displacement component `component` (0-based) at `node`.
struct DirichletCondition {
  int node = 0;
  int component = 0;
  double value = 0.0;
};

struct TractionLoad {
  std::size_t element = 0;
  int facet = 0;
  VectorField traction;
};

struct LoadCase {
  VectorField body_force;  // empty means no body force
  std::vector<TractionLoad> tractions;
  std::vector<DirichletCondition> dirichlet;
};

struct AssemblyOptions {
  int pfem_degree = 0;  // 0 selects default_pfem_degree(dim)
  int load_degree = 0;  // 0 selects the PFEM degree
  SubcellScheme scheme = SubcellScheme::maximal;
  SmoothingQuadrature smoothing{};
};

/// Everything needed for one linear elastostatic solve.
struct Problem {
  Mesh mesh;
  std::vector<Material> materials;  // one per element
  Method method = Method::csfem;
  LoadCase loads;
  AssemblyOptions options;

  int pfem_degree() const { return options.pfem_degree > 0 ? options.pfem_degree : default_pfem_degree(mesh.dim()); }
  int load_degree() const { return options.load_degree > 0 ? options.load_degree : pfem_degree(); }
};

/// Node-major, component-minor dof numbering: dof = dim * node + component.
struct GlobalSystem {
  int dim = 2;
  std::size_t node_count = 0;
  Eigen::SparseMatrix<double> K;
  Eigen::VectorXd f;
  std::size_t integration_points = 0;

  Eigen::Index dof(int node, int component) const { return static_cast<Eigen::Index>(dim) * node + component; }
  Eigen::Index ndof() const { return f.size(); }
};

enum class Execution { serial, parallel };

/// Element kernels run concurrently under `parallel`; the scatter is always
/// performed in element order so the result does not depend on thread count.
GlobalSystem assemble(const Problem& problem, Execution exec = Execution::parallel);

struct ConstrainedSystem {
  Eigen::SparseMatrix<double> K;
  Eigen::VectorXd f;
  std::vector<char> constrained;
  Eigen::VectorXd prescribed;
};

/// Symmetric elimination: constrained rows/columns are zeroed with a unit
/// diagonal and their known contributions moved to the right-hand side.
/// Throws InputError on out-of-range dofs or conflicting duplicate values.
ConstrainedSystem apply_dirichlet(const GlobalSystem& system, const std::vector<DirichletCondition>& constraints);

struct SolverOptions {
  enum class Kind { automatic, direct, cg };
  Kind kind = Kind::automatic;
  double cg_tolerance = 1e-12;
  double residual_tolerance = 1e-10;
  int max_iteration_factor = 20;
};

struct SolveReport {
  Eigen::VectorXd u;
  double relative_residual = 0.0;
  std::string solver;
  int iterations = 0;
  std::vector<double> residual_history;
};

/// Sparse LDL^T with a diagonally preconditioned CG fallback. Throws
/// SolverError when the relative residual contract cannot be met.
SolveReport solve(const ConstrainedSystem& system, const SolverOptions& options = {});

/// Preconditioned conjugate gradients with residual history (relative to |f|).
SolveReport solve_pcg(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& f, double tolerance,
                      int max_iterations);

/// K u - f on the unconstrained system: the reaction forces at supports.
Eigen::VectorXd reactions(const GlobalSystem& system, const Eigen::VectorXd& u);

/// Constant strain/stress over a smoothing cell (CSFEM) or sub-simplex
/// average (PFEM).
struct CellField {
  std::size_t element = 0;
  std::vector<Vec3> vertices;
  double measure = 0.0;
  Eigen::VectorXd strain;
  Eigen::VectorXd stress;
};

/// Numerical strain at an integration point, with its quadrature weight.
struct StrainSample {
  std::size_t element = 0;
  Vec3 point = Vec3::Zero();
  double weight = 0.0;
  Eigen::VectorXd strain;
};

struct SolutionField {
  Eigen::VectorXd u;
  std::vector<CellField> cells;
  std::vector<StrainSample> samples;
};

/// CSFEM: eps_c = Bt_c u_e per smoothing cell, sampled with a degree-3 rule
/// per cell. PFEM: compatible strains at degree-`pfem_sample_degree` points.
SolutionField recover_fields(const Problem& problem, const Eigen::VectorXd& u, int pfem_sample_degree = 6,
                             Execution exec = Execution::parallel);

/// Element displacement vector gathered from the global one.
Eigen::VectorXd element_dofs(const Mesh& mesh, std::size_t e, const Eigen::VectorXd& u);

}  // namespace sfem
