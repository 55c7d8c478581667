#pragma once

#include <string>

#include "sfem/system.hpp"

namespace sfem {

/// Legacy ASCII VTK unstructured grid. Each smoothing cell (CSFEM) or
/// sub-simplex (PFEM) becomes a VTK triangle/tetrahedron with its own points;
/// point data `displacement` is the Wachspress interpolant of u, cell data
/// `smoothed_stress` the constant Voigt stress of the cell.
std::string write_vtk(const Problem& problem, const SolutionField& field);

}  // namespace sfem
