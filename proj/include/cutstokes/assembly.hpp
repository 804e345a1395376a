#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "cutstokes/fields.hpp"
#include "cutstokes/geometry.hpp"
#include "cutstokes/spaces.hpp"

namespace cutstokes {

enum class Formulation { lagrange, nitsche };

struct SystemParameters {
  double gamma = 1.0;        // multiplier stabilization (Lagrange)
  double gamma0 = 10.0;      // Nitsche penalty
  double gamma1 = 0.1;       // boundary-pressure stabilization (Nitsche)
  double gamma2 = 0.1;       // ghost penalty (Nitsche)
  double curl_weight = 1.0;  // curl stabilization on cut elements (Lagrange)
  double omega = 0.0;        // Coriolis frequency
};

struct BlockRanges {
  int velocity_begin = 0, velocity_end = 0;
  int pressure_begin = 0, pressure_end = 0;
  int multiplier_begin = 0, multiplier_end = 0;
};

struct SaddleSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  BlockRanges blocks;
  Formulation formulation = Formulation::lagrange;
  SystemParameters params;
};

/// Everything the forms integrate against. All vectors are indexed by
/// background element id; only active entries are populated.
struct AssemblyContext {
  const BackgroundMesh& mesh;
  const ActiveMesh& active;
  const std::vector<MacroPartition>& partitions;
  const std::vector<MacroElementBasis>& bases;
  const DofMap& dofs;
  const std::vector<CutCellQuadrature>& cut_quad;
  const std::vector<BoundaryQuadrature>& boundary_quad;
};

using SparseMat = Eigen::SparseMatrix<double>;

/// Viscous block: integral over the physical domain of grad u : grad v.
SparseMat assemble_viscous(const AssemblyContext& ctx);

/// Pressure-velocity coupling over full elements of the mesh domain:
/// -b_h(p, v) into the velocity rows and +b_h(q, u) into the pressure rows,
/// emitted in one loop so the skew pairing is exact bit for bit.
SparseMat assemble_velocity_pressure(const AssemblyContext& ctx);

/// Boundary coupling: +c(lambda, v) into velocity rows, -c(mu, u) into
/// multiplier rows (vector multiplier, 2 dofs per cut element).
SparseMat assemble_boundary_coupling(const AssemblyContext& ctx);

/// Face jump stabilization of the vector multiplier over interior faces of
/// the cut layer: sum_F h_F |F| [lambda] . [mu].
SparseMat assemble_multiplier_stabilization(const AssemblyContext& ctx);

/// Curl-curl stabilization over full cut elements, scaled with h_T^2.
SparseMat assemble_curl_stabilization(const AssemblyContext& ctx);

/// Coriolis block (2 omega cross u, v) over the physical domain; skew.
SparseMat assemble_coriolis(const AssemblyContext& ctx, double omega);

/// Right-hand side: volume force on the velocity rows and the boundary data
/// on the multiplier rows, signed so the multiplier equation enforces
/// integral of (u_h - u_gamma) . mu = gamma j(lambda_h, mu).
Eigen::VectorXd assemble_rhs(const AssemblyContext& ctx, const VectorField& f,
                             const VectorField& u_gamma);

SaddleSystem build_lagrange_system(const AssemblyContext& ctx, const SystemParameters& params,
                                   const VectorField& f, const VectorField& u_gamma);

/// Nitsche boundary terms: consistency, symmetrization, penalty gamma0/h_T
/// and the scalar boundary-pressure coupling (1 dof per cut element).
SparseMat assemble_nitsche_boundary(const AssemblyContext& ctx, double gamma0);

/// Scalar variant of the face jump stabilization for the boundary pressure.
SparseMat assemble_scalar_multiplier_stabilization(const AssemblyContext& ctx);

/// Ghost penalty: gradient jumps over faces of cut elements that are not on
/// the mesh-domain boundary, scaled with h_F.
SparseMat assemble_gradient_jump_penalty(const AssemblyContext& ctx);

Eigen::VectorXd assemble_nitsche_rhs(const AssemblyContext& ctx, double gamma0,
                                     const VectorField& f, const VectorField& u_gamma);

SaddleSystem build_nitsche_system(const AssemblyContext& ctx, const SystemParameters& params,
                                  const VectorField& f, const VectorField& u_gamma);

}  // namespace cutstokes
