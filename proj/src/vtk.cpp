#include "sfem/vtk.hpp"

#include <charconv>
#include <optional>
#include <sstream>

#include "sfem/wachspress.hpp"

namespace sfem {

namespace {

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string write_vtk(const Problem& problem, const SolutionField& field) {
  const auto& mesh = problem.mesh;
  const int dim = mesh.dim();
  std::size_t npoints = 0;
  for (const auto& c : field.cells) npoints += c.vertices.size();

  std::ostringstream os;
  os << "# vtk DataFile Version 3.0\nsfem " << to_string(problem.method) << " solution\nASCII\n"
     << "DATASET UNSTRUCTURED_GRID\nPOINTS " << npoints << " double\n";
  for (const auto& c : field.cells) {
    for (const auto& x : c.vertices) os << num(x.x()) << ' ' << num(x.y()) << ' ' << num(x.z()) << '\n';
  }
  os << "CELLS " << field.cells.size() << ' ' << field.cells.size() + npoints << '\n';
  std::size_t next = 0;
  for (const auto& c : field.cells) {
    os << c.vertices.size();
    for (std::size_t i = 0; i < c.vertices.size(); ++i) os << ' ' << next++;
    os << '\n';
  }
  os << "CELL_TYPES " << field.cells.size() << '\n';
  for (const auto& c : field.cells) {
    const std::size_t n = c.vertices.size();
    os << (n == 3 ? 5 : n == 4 && dim == 3 ? 10 : dim == 2 ? 7 : 42) << '\n';
  }

  os << "POINT_DATA " << npoints << "\nVECTORS displacement double\n";
  std::size_t cached = static_cast<std::size_t>(-1);
  std::optional<ElementBasis> basis;
  Eigen::VectorXd ue;
  for (const auto& c : field.cells) {
    if (c.element != cached) {
      basis.emplace(ElementBasis::from_mesh(mesh, c.element));
      ue = element_dofs(mesh, c.element, field.u);
      cached = c.element;
    }
    for (const auto& x : c.vertices) {
      const Eigen::VectorXd phi = basis->values(x);
      Vec3 u = Vec3::Zero();
      for (Eigen::Index a = 0; a < phi.size(); ++a) {
        for (int i = 0; i < dim; ++i) u[i] += phi[a] * ue[dim * a + i];
      }
      os << num(u.x()) << ' ' << num(u.y()) << ' ' << num(u.z()) << '\n';
    }
  }
  const int ncomp = dim == 2 ? 3 : 6;
  os << "CELL_DATA " << field.cells.size() << "\nFIELD FieldData 1\nsmoothed_stress " << ncomp << ' '
     << field.cells.size() << " double\n";
  for (const auto& c : field.cells) {
    for (int k = 0; k < ncomp; ++k) os << (k ? " " : "") << num(c.stress[k]);
    os << '\n';
  }
  return os.str();
}

}  // namespace sfem
