#pragma once

#include <memory>

#include "cutstokes/assembly.hpp"
#include "cutstokes/config.hpp"
#include "cutstokes/geometry.hpp"
#include "cutstokes/spaces.hpp"

namespace cutstokes {

/// Everything a solve needs on one mesh: geometry classification, active
/// mesh, macro partitions, basis tables, dof map and the assembly rules.
struct Discretization {
  BackgroundMesh mesh;
  LevelSetGeometry geom;
  std::vector<ElementClassification> classification;
  ActiveMesh active;
  std::vector<MacroPartition> partitions;
  std::vector<MacroElementBasis> bases;
  DofMap dofs;
  std::vector<CutCellQuadrature> cut_quad;
  std::vector<BoundaryQuadrature> boundary_quad;

  AssemblyContext context() const {
    return AssemblyContext{mesh, active, partitions, bases, dofs, cut_quad, boundary_quad};
  }
};

Discretization build_discretization(int n, const Box& box, const LevelSetGeometry& geom,
                                    Formulation formulation, int quad_order = 2,
                                    int boundary_quad_order = 2, int boundary_subdivisions = 4);

Discretization build_discretization(int n, const RunConfig& config);

LevelSetGeometry geometry_from_config(const RunConfig& config);

}  // namespace cutstokes
