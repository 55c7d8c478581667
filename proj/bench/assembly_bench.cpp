// Serial vs OpenMP timings of the element kernels (assembly, field recovery,
// error integration) on the benchmark ladders.
#include <chrono>
#include <cstdio>
#include <functional>

#include <CLI11.hpp>
#include <omp.h>

#include "sfem/benchmarks.hpp"
#include "sfem/system.hpp"

using namespace sfem;

namespace {

double best_of(int repeats, const std::function<void()>& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs parallel kernel timings"};
  bool quick = false;
  int repeats = 3;
  app.add_flag("--quick", quick, "small meshes, one repeat");
  app.add_option("--repeats", repeats, "timing repeats (best is reported)");
  CLI11_PARSE(app, argc, argv);
  if (quick) repeats = 1;

  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-14s %-6s %8s %-10s %10s %10s %8s %s\n", "problem", "method", "elements", "kernel", "serial_s",
              "parallel_s", "speedup", "identical");
  struct Case {
    Benchmark b;
    int level;
  };
  const std::vector<Case> cases = quick ? std::vector<Case>{{Benchmark::cantilever2d, 0}, {Benchmark::cube_body, 0}}
                                        : std::vector<Case>{{Benchmark::cantilever2d, 3}, {Benchmark::cube_body, 1}};
  bool all_identical = true;
  for (const auto& c : cases) {
    const auto mesh = benchmark_mesh(c.b, c.level);
    for (auto method : {Method::csfem, Method::pfem}) {
      const auto p = make_benchmark_problem(c.b, mesh, method);
      GlobalSystem a, b;
      const double ts = best_of(repeats, [&] { a = assemble(p, Execution::serial); });
      const double tp = best_of(repeats, [&] { b = assemble(p, Execution::parallel); });
      const bool same = (Eigen::MatrixXd(a.K) - Eigen::MatrixXd(b.K)).norm() == 0.0 && a.f == b.f;
      all_identical = all_identical && same;
      std::printf("%-14s %-6s %8zu %-10s %10.4f %10.4f %8.2f %s\n", to_string(c.b).c_str(), to_string(method).c_str(),
                  mesh.element_count(), "assemble", ts, tp, ts / tp, same ? "yes" : "NO");

      const auto u = solve(apply_dirichlet(a, p.loads.dirichlet)).u;
      SolutionField fs, fp;
      const double rs = best_of(repeats, [&] { fs = recover_fields(p, u, 6, Execution::serial); });
      const double rp = best_of(repeats, [&] { fp = recover_fields(p, u, 6, Execution::parallel); });
      bool same_f = fs.samples.size() == fp.samples.size() && fs.cells.size() == fp.cells.size();
      for (std::size_t i = 0; same_f && i < fs.samples.size(); ++i) same_f = fs.samples[i].strain == fp.samples[i].strain;
      all_identical = all_identical && same_f;
      std::printf("%-14s %-6s %8zu %-10s %10.4f %10.4f %8.2f %s\n", to_string(c.b).c_str(), to_string(method).c_str(),
                  mesh.element_count(), "recover", rs, rp, rs / rp, same_f ? "yes" : "NO");
    }
  }
  return all_identical ? 0 : 1;
}
