#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cutstokes/assembly.hpp"
#include "cutstokes/fields.hpp"

namespace cutstokes {

/// Per-mesh error measurements and diagnostics for the convergence tables.
struct ErrorReport {
  int n = 0;              // structured divisions per side
  double h = 0.0;         // 1 / sqrt(#active vertices)
  double e_u_L2 = 0.0;    // velocity L2 error over the physical domain
  double e_u_H1 = 0.0;    // full H1 norm of the velocity error
  double e_u_H1_semi = 0.0;  // gradient seminorm, for the 1:1 slope comparison
  double e_p_interior = 0.0; // pressure L2 error over the uncut elements
  double e_p_extended = 0.0; // extended pressure L2 error over the domain
  double e_lambda_L2Gamma = 0.0;  // multiplier L2 error on the boundary
  double div_max = 0.0;   // max |div u_h| over the active elements
  double u_H1_norm = 0.0; // ||u_h||_{H1} over the mesh domain
  double residual = 0.0;  // relative solver residual
};

/// Sparse LU solve of the indefinite saddle-point system; one step of
/// iterative refinement keeps the residual near machine precision. Throws if
/// the factorization fails or the relative residual exceeds 1e-9.
Eigen::VectorXd solve_direct(const SaddleSystem& system, double* residual_out = nullptr);

/// Split a raw solution vector into the three fields.
FieldCoefficients split_solution(const SaddleSystem& system, const Eigen::VectorXd& x);

/// For every cut element, the interior element with the closest centroid
/// (ties resolved toward the lower element index); identity on interior
/// elements. Indexed by background element id.
std::vector<int> nearest_interior_map(const BackgroundMesh& mesh, const ActiveMesh& active);

/// Post-processed pressure: subtract the mesh-domain mean, then replace every
/// cut-element value with the value of its nearest interior element.
Eigen::VectorXd extend_pressure(const Eigen::VectorXd& pressure_dofs, const BackgroundMesh& mesh,
                                const ActiveMesh& active, const DofMap& dofs);

/// The element-wise constant divergence of the discrete velocity plus its max
/// absolute value. Indexed by background element id.
struct DivergenceField {
  std::vector<double> per_element;
  double max_abs = 0.0;
};
DivergenceField compute_divergence_field(const AssemblyContext& ctx,
                                         const Eigen::VectorXd& velocity_dofs);

/// Error norms of a discrete solution against analytic fields, integrated
/// with dedicated high-order cut/boundary rules. The multiplier error is
/// measured against -(grad u)^T n + p n at the boundary quadrature points.
ErrorReport compute_errors(const AssemblyContext& ctx, const LevelSetGeometry& geom,
                           const std::vector<ElementClassification>& classification,
                           const ExactStokesSolution& exact, const FieldCoefficients& solution);

/// ||u_h||_{H1} over the full mesh domain (used to scale the divergence
/// acceptance bound).
double velocity_h1_norm_mesh_domain(const AssemblyContext& ctx,
                                    const Eigen::VectorXd& velocity_dofs);

}  // namespace cutstokes
