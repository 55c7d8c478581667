#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sfem/benchmarks.hpp"
#include "sfem/error.hpp"
#include "sfem/inp.hpp"
#include "sfem/mesh_gen.hpp"
#include "sfem/system.hpp"
#include "sfem/vtk.hpp"

namespace {

using namespace sfem;

constexpr int kOk = 0;
constexpr int kNumerical = 1;
constexpr int kInput = 2;

void write_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << content;
    if (!out) throw InputError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> numbers(const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw InputError("bad number '" + item + "' in --domain");
    out.push_back(v);
  }
  return out;
}

// rect:LxD[:x0,y0] | plate:AxSIDE | cube:S[:x0,y0,z0] | box:AxBxC[:x0,y0,z0]
DomainGeometry parse_domain(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw InputError("--domain needs kind:size, e.g. rect:8x4");
  const std::string kind = spec.substr(0, colon);
  std::string rest = spec.substr(colon + 1);
  std::string origin;
  if (const auto c2 = rest.find(':'); c2 != std::string::npos) {
    origin = rest.substr(c2 + 1);
    rest = rest.substr(0, c2);
  }
  const auto size = numbers(rest, 'x');
  const auto at = origin.empty() ? std::vector<double>{} : numbers(origin, ',');
  auto origin_of = [&](std::size_t n) {
    Vec3 o = Vec3::Zero();
    if (!at.empty() && at.size() != n) throw InputError("--domain origin needs " + std::to_string(n) + " values");
    for (std::size_t i = 0; i < at.size(); ++i) o[static_cast<Eigen::Index>(i)] = at[i];
    return o;
  };
  if (kind == "rect" && size.size() == 2) {
    const Vec3 o = origin_of(2);
    return DomainGeometry::rectangle(size[0], size[1], o.x(), o.y());
  }
  if (kind == "plate" && size.size() == 2 && at.empty()) return DomainGeometry::quarter_plate_with_hole(size[0], size[1]);
  if (kind == "cube" && size.size() == 1) return DomainGeometry::box(Vec3::Constant(size[0]), origin_of(3));
  if (kind == "box" && size.size() == 3) return DomainGeometry::box(Vec3(size[0], size[1], size[2]), origin_of(3));
  throw InputError("unrecognised --domain '" + spec + "'");
}

struct MeshArgs {
  std::string domain;
  int n = 100;
  std::uint64_t seed = 42;
  int lloyd = 30;
  int layers = 0;
  double E = 1.0;
  double nu = 0.3;
  std::string method = "csfem";
  std::string output;
};

int cmd_mesh(const MeshArgs& a) {
  const auto domain = parse_domain(a.domain);
  domain.check();
  Mesh mesh = domain.dim() == 2
                  ? voronoi_mesh(domain, a.n, a.lloyd, a.seed)
                  : polyhedral_box_mesh(domain, a.n,
                                        a.layers > 0 ? a.layers : std::max(1, static_cast<int>(std::lround(std::sqrt(a.n)))),
                                        a.lloyd, a.seed);
  const Model model = make_model(mesh, a.E, a.nu, parse_method(a.method));
  write_atomic(a.output, write_inp(model));
  std::cout << "wrote " << a.output << ": " << mesh.element_count() << " elements, " << mesh.node_count() << " nodes";
  for (const auto& g : model.groups) std::cout << ", " << g.label() << " x" << g.elements.size();
  std::cout << '\n';
  return kOk;
}

struct SolveArgs {
  std::string deck;
  std::string problem;
  std::string method;
  std::string vtk;
  int pfem_degree = 0;
};

int cmd_solve(const SolveArgs& a) {
  const Model model = parse_inp(read_file(a.deck));
  for (const auto& w : model.warnings) std::cerr << "warning: " << w << '\n';
  const Mesh mesh = to_mesh(model);
  if (const auto report = validate_mesh(mesh); !report.ok()) throw GeometryError("invalid mesh:\n" + report.summary());
  const Method method = a.method.empty() ? model.method : parse_method(a.method);
  AssemblyOptions assembly;
  assembly.pfem_degree = a.pfem_degree;

  Problem problem{mesh, {}, method, {}, assembly};
  std::optional<AnalyticalSolution> exact;
  if (!a.problem.empty()) {
    const Benchmark b = parse_benchmark(a.problem);
    problem = make_benchmark_problem(b, mesh, method, assembly);
    exact = benchmark_solution(b, mesh.dim());
    for (const auto& m : element_materials(model)) {
      if (m.E != exact->material.E || m.nu != exact->material.nu) {
        std::cerr << "warning: deck material replaced by the " << a.problem << " preset (E=" << exact->material.E
                  << ", nu=" << exact->material.nu << ")\n";
        break;
      }
    }
  } else {
    problem.materials = element_materials(model);
    std::map<int, std::size_t> index;
    const auto ids = element_ids(model);
    for (std::size_t e = 0; e < ids.size(); ++e) index[ids[e]] = e;
    std::map<int, int> node_index;
    for (std::size_t i = 0; i < model.nodes.size(); ++i) node_index[model.nodes[i].id] = static_cast<int>(i);
    for (const auto& b : model.boundary) {
      const auto it = node_index.find(b.node);
      if (it == node_index.end()) throw InputError("*Boundary on undefined node " + std::to_string(b.node));
      problem.loads.dirichlet.push_back({it->second, b.dof - 1, b.value});
    }
    for (const auto& t : model.tractions) {
      const auto it = index.find(t.element);
      if (it == index.end()) throw InputError("*Traction on undefined element " + std::to_string(t.element));
      const Vec3 value = t.t;
      problem.loads.tractions.push_back({it->second, t.facet - 1, [value](const Vec3&) { return value; }});
    }
    if (model.body_force) {
      const Vec3 b = *model.body_force;
      problem.loads.body_force = [b](const Vec3&) { return b; };
    }
  }

  const auto system = assemble(problem);
  const auto rep = solve(apply_dirichlet(system, problem.loads.dirichlet));
  const auto field = recover_fields(problem, rep.u);
  std::cout << "method=" << to_string(method) << " elements=" << mesh.element_count() << " ndof=" << system.ndof()
            << " solver=" << rep.solver << " residual=" << rep.relative_residual;
  if (exact) {
    std::cout << " L2=" << l2_error(mesh, rep.u, exact->displacement)
              << " H1=" << h1_energy_error(field, problem.materials, [&](const Vec3& x) { return exact->strain(x); });
  }
  std::cout << '\n';
  if (!a.vtk.empty()) write_atomic(a.vtk, write_vtk(problem, field));
  return kOk;
}

struct ConvergeArgs {
  std::string problem;
  std::string method = "both";
  int levels = 4;
  std::string csv;
  std::string svg;
  std::uint64_t seed = 42;
  int lloyd = 30;
  int pfem_degree = 0;
};

int cmd_converge(const ConvergeArgs& a) {
  const Benchmark b = parse_benchmark(a.problem);
  if (b == Benchmark::patch) throw InputError("converge needs one of the four convergence benchmarks");
  if (a.levels < 1 || a.levels > ladder_size(b)) {
    throw InputError("--levels must be between 1 and " + std::to_string(ladder_size(b)));
  }
  std::vector<Method> methods;
  if (a.method == "both") {
    methods = {Method::csfem, Method::pfem};
  } else {
    methods = {parse_method(a.method)};
  }
  RunOptions options;
  options.ladder = {a.lloyd, a.seed};
  options.assembly.pfem_degree = a.pfem_degree;

  std::vector<ConvergenceReport> reports;
  for (auto m : methods) reports.push_back({b, m, {}, {}, {}});
  std::string csv = convergence_csv_header();
  auto flush = [&]() {
    if (!a.csv.empty()) write_atomic(a.csv, csv);
  };
  for (int level = 0; level < a.levels; ++level) {
    const Mesh mesh = benchmark_mesh(b, level, options.ladder);
    for (auto& r : reports) {
      try {
        auto result = run_benchmark(b, mesh, r.method, options);
        result.level = level;
        r.levels.push_back(result);
        csv += convergence_csv_row(r, result);
      } catch (...) {
        flush();
        throw;
      }
    }
  }
  for (auto& r : reports) {
    if (r.levels.size() < 2) continue;
    std::vector<double> h, l2, h1;
    for (const auto& l : r.levels) {
      h.push_back(l.h);
      l2.push_back(l.l2);
      h1.push_back(l.h1);
    }
    r.l2_rate = convergence_rate(h, l2);
    r.h1_rate = convergence_rate(h, h1);
  }
  flush();
  if (a.csv.empty()) std::cout << csv;
  for (const auto& r : reports) {
    if (r.levels.size() < 2) continue;
    std::cout << "rate " << to_string(r.method) << ' ' << to_string(b) << " L2 " << r.l2_rate.slope << " H1 "
              << r.h1_rate.slope;
    if (!r.l2_rate.monotone || !r.h1_rate.monotone) std::cout << " (warning: errors not monotone)";
    std::cout << '\n';
  }
  if (!a.svg.empty()) write_atomic(a.svg, convergence_svg(reports));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smoothed and polygonal finite elements for linear elasticity"};
  app.require_subcommand(1);

  MeshArgs mesh_args;
  auto* mesh = app.add_subcommand("mesh", "Generate a Voronoi (2D) or extruded polyhedral (3D) mesh deck");
  mesh->add_option("--domain", mesh_args.domain, "rect:LxD[:x0,y0] | plate:AxSIDE | cube:S | box:AxBxC[:x0,y0,z0]")
      ->required();
  mesh->add_option("--n", mesh_args.n, "number of cells (per layer in 3D)");
  mesh->add_option("--seed", mesh_args.seed, "random seed");
  mesh->add_option("--lloyd", mesh_args.lloyd, "Lloyd iterations");
  mesh->add_option("--layers", mesh_args.layers, "extrusion layers (3D)");
  mesh->add_option("--E", mesh_args.E, "Young's modulus written to the deck");
  mesh->add_option("--nu", mesh_args.nu, "Poisson's ratio written to the deck");
  mesh->add_option("--method", mesh_args.method, "analysis method recorded in the deck")
      ->check(CLI::IsMember({"csfem", "pfem"}));
  mesh->add_option("-o,--output", mesh_args.output, "output .inp path")->required();

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Solve a deck, optionally with a benchmark preset");
  solve->add_option("deck", solve_args.deck, "input .inp deck")->required();
  solve->add_option("--problem", solve_args.problem, "boundary-condition preset (patch, cantilever2d, ...)");
  solve->add_option("--method", solve_args.method, "override the deck's method")
      ->check(CLI::IsMember({"csfem", "pfem"}));
  solve->add_option("--vtk", solve_args.vtk, "write a legacy VTK file");
  solve->add_option("--pfem-degree", solve_args.pfem_degree, "PFEM quadrature degree (0 = default)");

  ConvergeArgs conv_args;
  auto* conv = app.add_subcommand("converge", "Run a refinement ladder and fit convergence rates");
  conv->add_option("--problem", conv_args.problem, "cantilever2d, plate_hole, cube_body or cantilever3d")->required();
  conv->add_option("--method", conv_args.method, "csfem, pfem or both")
      ->check(CLI::IsMember({"csfem", "pfem", "both"}));
  conv->add_option("--levels", conv_args.levels, "number of ladder levels");
  conv->add_option("--csv", conv_args.csv, "CSV output path (stdout if omitted)");
  conv->add_option("--svg", conv_args.svg, "optional log-log plot");
  conv->add_option("--seed", conv_args.seed, "mesh seed");
  conv->add_option("--lloyd", conv_args.lloyd, "Lloyd iterations");
  conv->add_option("--pfem-degree", conv_args.pfem_degree, "PFEM quadrature degree (0 = default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*mesh) return cmd_mesh(mesh_args);
    if (*solve) return cmd_solve(solve_args);
    return cmd_converge(conv_args);
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\nresidual history:";
    for (double r : e.residual_history()) std::cerr << ' ' << r;
    std::cerr << '\n';
    return kNumerical;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const GeometryError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
}
