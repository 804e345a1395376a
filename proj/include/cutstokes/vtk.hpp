#pragma once

#include <Eigen/Dense>
#include <string>

#include "cutstokes/discretization.hpp"
#include "cutstokes/solve.hpp"

namespace cutstokes {

/// Legacy ASCII VTK (POLYDATA triangles) of the solution fields on the macro
/// sub-triangulation: velocity at every sub-triangulation point plus
/// per-sub-triangle cell data, so the composite element renders faithfully.
/// Per-element constants (pressure, extended pressure, divergence,
/// multiplier) repeat over the 6 sub-triangles of their element.
void write_fields_vtk(const std::string& path, const Discretization& d,
                      const FieldCoefficients& solution);

}  // namespace cutstokes
