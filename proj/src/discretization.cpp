#include "cutstokes/discretization.hpp"

#include <stdexcept>

namespace cutstokes {

LevelSetGeometry geometry_from_config(const RunConfig& config) {
  if (config.geometry == "disk") return LevelSetGeometry::disk(config.center, config.radius);
  throw std::invalid_argument("geometry_from_config: only the disk geometry is configurable");
}

Discretization build_discretization(int n, const Box& box, const LevelSetGeometry& geom,
                                    Formulation formulation, int quad_order,
                                    int boundary_quad_order, int boundary_subdivisions) {
  Discretization d{generate_structured_mesh(n, box), geom, {}, {}, {}, {}, {}, {}, {}};
  d.classification = classify_elements(d.mesh, d.geom);
  d.active = extract_active_mesh(d.mesh, d.classification);
  d.partitions = build_macro_partition(d.mesh, d.active);
  d.bases = build_element_bases(d.mesh, d.active, d.partitions);
  d.dofs = build_dof_map(d.mesh, d.active, formulation == Formulation::lagrange ? 2 : 1);
  d.cut_quad = build_cut_quadrature(d.mesh, d.geom, d.classification, d.partitions, quad_order);
  d.boundary_quad = build_boundary_quadrature(d.mesh, d.geom, d.classification, d.partitions,
                                              boundary_quad_order, boundary_subdivisions);
  return d;
}

Discretization build_discretization(int n, const RunConfig& config) {
  return build_discretization(n, config.box, geometry_from_config(config), config.formulation,
                              config.quad_order, config.boundary_quad_order,
                              config.boundary_subdivisions);
}

}  // namespace cutstokes
