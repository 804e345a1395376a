#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cutstokes/fields.hpp"
#include "cutstokes/geometry.hpp"
#include "cutstokes/spaces.hpp"

namespace cutstokes {

/// Clement-type vertex values: at every active vertex, the area-weighted
/// average over the vertex patch of the element-wise L2 projections onto
/// linears, evaluated at the vertex. Indexed by background vertex id.
std::vector<Vec2> clement_interpolate(const BackgroundMesh& mesh, const ActiveMesh& active,
                                      const std::vector<MacroPartition>& partitions,
                                      const VectorField& v);

/// Divergence-preserving interpolant: Clement vertex values plus face bubble
/// coefficients chosen so that every face flux of the interpolant matches the
/// flux of v (5-point Gauss per face sub-edge on the right-hand side).
Eigen::VectorXd interpolate_velocity(const BackgroundMesh& mesh, const ActiveMesh& active,
                                     const std::vector<MacroPartition>& partitions,
                                     const std::vector<MacroElementBasis>& bases,
                                     const DofMap& dofs, const VectorField& v);

/// Velocity interpolant with all face coefficients forced to zero (plain
/// vertex interpolation); reproduces affine fields exactly.
Eigen::VectorXd interpolate_velocity_no_bubbles(const BackgroundMesh& mesh,
                                                const ActiveMesh& active,
                                                const std::vector<MacroPartition>& partitions,
                                                const DofMap& dofs, const VectorField& v);

/// Element-mean pressure projection: value on T is the integral of p over
/// T cap Omega divided by the full element area.
Eigen::VectorXd project_pressure(const BackgroundMesh& mesh, const ActiveMesh& active,
                                 const DofMap& dofs,
                                 const std::vector<CutCellQuadrature>& cut_quad,
                                 const ScalarField& p);

/// Piecewise-constant multiplier from boundary segment means: on each cut
/// element the average of mu over the boundary piece inside the element.
Eigen::VectorXd project_multiplier(const BackgroundMesh& mesh, const ActiveMesh& active,
                                   const DofMap& dofs,
                                   const std::vector<BoundaryQuadrature>& boundary_quad,
                                   const VectorField& mu);

/// Flux of the discrete velocity through a face with respect to the fixed
/// face orientation, integrated exactly from the composite linear pieces.
double discrete_face_flux(const BackgroundMesh& mesh, const ActiveMesh& active,
                          const std::vector<MacroPartition>& partitions,
                          const std::vector<MacroElementBasis>& bases, const DofMap& dofs,
                          const Eigen::VectorXd& velocity_dofs, int face);

/// Flux of an analytic field through a face (5-point Gauss per sub-edge).
double analytic_face_flux(const BackgroundMesh& mesh, const ActiveMesh& active,
                          const std::vector<MacroPartition>& partitions, const VectorField& v,
                          int face);

}  // namespace cutstokes
