#include "cutstokes/solve.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cutstokes {

Eigen::VectorXd solve_direct(const SaddleSystem& system, double* residual_out) {
  const double rhs_norm = system.rhs.norm();
  if (rhs_norm == 0.0) {
    if (residual_out) *residual_out = 0.0;
    return Eigen::VectorXd::Zero(system.rhs.size());
  }
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(system.matrix);
  lu.factorize(system.matrix);
  if (lu.info() != Eigen::Success) {
    throw std::runtime_error("solve_direct: factorization failed (" + lu.lastErrorMessage() +
                             "); the system may be singular or severely ill-conditioned");
  }
  Eigen::VectorXd x = lu.solve(system.rhs);
  Eigen::VectorXd r = system.rhs - system.matrix * x;
  if (r.norm() > 1e-12 * rhs_norm) {
    x += lu.solve(r);  // one refinement step
    r = system.rhs - system.matrix * x;
  }
  const double rel = r.norm() / rhs_norm;
  if (residual_out) *residual_out = rel;
  if (!(rel <= 1e-9)) {
    throw std::runtime_error("solve_direct: relative residual " + std::to_string(rel) +
                             " exceeds 1e-9");
  }
  return x;
}

FieldCoefficients split_solution(const SaddleSystem& system, const Eigen::VectorXd& x) {
  FieldCoefficients f;
  const BlockRanges& b = system.blocks;
  f.velocity = x.segment(b.velocity_begin, b.velocity_end - b.velocity_begin);
  f.pressure = x.segment(b.pressure_begin, b.pressure_end - b.pressure_begin);
  f.multiplier = x.segment(b.multiplier_begin, b.multiplier_end - b.multiplier_begin);
  return f;
}

std::vector<int> nearest_interior_map(const BackgroundMesh& mesh, const ActiveMesh& active) {
  if (active.interior_elements.empty())
    throw std::runtime_error("nearest_interior_map: no interior elements");
  std::vector<int> map(static_cast<size_t>(mesh.num_triangles()), -1);
  for (int t : active.interior_elements) map[static_cast<size_t>(t)] = t;
  for (int t : active.cut_elements) {
    const Vec2 c = mesh.barycenter(t);
    double best = std::numeric_limits<double>::max();
    int best_id = -1;
    for (int s : active.interior_elements) {
      const double d = (mesh.barycenter(s) - c).squared_norm();
      if (d < best - 1e-30 || (std::abs(d - best) <= 1e-30 && s < best_id)) {
        best = d;
        best_id = s;
      }
    }
    map[static_cast<size_t>(t)] = best_id;
  }
  return map;
}

Eigen::VectorXd extend_pressure(const Eigen::VectorXd& pressure_dofs, const BackgroundMesh& mesh,
                                const ActiveMesh& active, const DofMap& dofs) {
  double mean = 0.0, total_area = 0.0;
  for (int t : active.active_elements) {
    const double a = mesh.area(t);
    mean += a * pressure_dofs[dofs.pressure_dof(t) - dofs.pressure_offset];
    total_area += a;
  }
  mean /= total_area;

  const std::vector<int> target = nearest_interior_map(mesh, active);
  Eigen::VectorXd out(pressure_dofs.size());
  for (int t : active.active_elements) {
    const int src = target[static_cast<size_t>(t)];
    out[dofs.pressure_dof(t) - dofs.pressure_offset] =
        pressure_dofs[dofs.pressure_dof(src) - dofs.pressure_offset] - mean;
  }
  return out;
}

DivergenceField compute_divergence_field(const AssemblyContext& ctx,
                                         const Eigen::VectorXd& velocity_dofs) {
  DivergenceField out;
  out.per_element.assign(static_cast<size_t>(ctx.mesh.num_triangles()), 0.0);
  for (int t : ctx.active.active_elements) {
    const double d = element_divergence(ctx.mesh, ctx.dofs, ctx.bases, velocity_dofs, t);
    out.per_element[static_cast<size_t>(t)] = d;
    out.max_abs = std::max(out.max_abs, std::abs(d));
  }
  return out;
}

double velocity_h1_norm_mesh_domain(const AssemblyContext& ctx,
                                    const Eigen::VectorXd& velocity_dofs) {
  const TriangleRule rule = triangle_rule(2);
  double total = 0.0;
  for (int t : ctx.active.active_elements) {
    const MacroPartition& part = ctx.partitions[static_cast<size_t>(t)];
    const MacroElementBasis& basis = ctx.bases[static_cast<size_t>(t)];
    const std::array<int, 9> g = element_velocity_dofs(ctx.mesh, ctx.dofs, t);
    for (int s = 0; s < 6; ++s) {
      const auto& st = part.sub_triangles[static_cast<size_t>(s)];
      const double area = part.sub_area(s);
      Mat2 G;
      for (int i = 0; i < 9; ++i)
        G += basis.fn[static_cast<size_t>(i)].grad[static_cast<size_t>(s)] *
             velocity_dofs[g[static_cast<size_t>(i)]];
      for (size_t qi = 0; qi < rule.weights.size(); ++qi) {
        const auto& l = rule.barycentric[qi];
        const Vec2 p = st[0] * l[0] + st[1] * l[1] + st[2] * l[2];
        Vec2 u{0, 0};
        for (int i = 0; i < 9; ++i)
          u += basis.fn[static_cast<size_t>(i)].value(s, p) * velocity_dofs[g[static_cast<size_t>(i)]];
        total += rule.weights[qi] * area * (u.squared_norm() + G.ddot(G));
      }
    }
  }
  return std::sqrt(total);
}

ErrorReport compute_errors(const AssemblyContext& ctx, const LevelSetGeometry& geom,
                           const std::vector<ElementClassification>& classification,
                           const ExactStokesSolution& exact, const FieldCoefficients& solution) {
  ErrorReport rep;
  rep.h = ctx.active.reported_h;

  // Dedicated high-order rules keep the quadrature error well below the
  // discretization error being measured.
  const std::vector<CutCellQuadrature> vol_quad =
      build_cut_quadrature(ctx.mesh, geom, classification, ctx.partitions, 5);
  const std::vector<BoundaryQuadrature> bnd_quad =
      build_boundary_quadrature(ctx.mesh, geom, classification, ctx.partitions, 5);

  const Eigen::VectorXd extended =
      extend_pressure(solution.pressure, ctx.mesh, ctx.active, ctx.dofs);

  double e_u2 = 0.0, e_grad2 = 0.0, e_p_int2 = 0.0, e_p_ext2 = 0.0;
  for (int t : ctx.active.active_elements) {
    const CutCellQuadrature& q = vol_quad[static_cast<size_t>(t)];
    const MacroElementBasis& basis = ctx.bases[static_cast<size_t>(t)];
    const std::array<int, 9> g = element_velocity_dofs(ctx.mesh, ctx.dofs, t);
    const double p_h = solution.pressure[ctx.dofs.pressure_dof(t) - ctx.dofs.pressure_offset];
    const double p_ext = extended[ctx.dofs.pressure_dof(t) - ctx.dofs.pressure_offset];
    const bool interior = !ctx.active.is_cut(t);
    for (size_t i = 0; i < q.points.size(); ++i) {
      const Vec2 x = q.points[i];
      const double w = q.weights[i];
      Vec2 u{0, 0};
      Mat2 G;
      for (int k = 0; k < 9; ++k) {
        const double c = solution.velocity[g[static_cast<size_t>(k)]];
        u += basis.fn[static_cast<size_t>(k)].value(q.sub_tri[i], x) * c;
        G += basis.fn[static_cast<size_t>(k)].grad[static_cast<size_t>(q.sub_tri[i])] * c;
      }
      const Vec2 du = u - exact.velocity.value(x);
      const Mat2 dG = G - exact.velocity.jacobian(x);
      e_u2 += w * du.squared_norm();
      e_grad2 += w * dG.ddot(dG);
      const double dp = p_h - exact.pressure.value(x);
      if (interior) e_p_int2 += w * dp * dp;
      const double dpe = p_ext - exact.pressure.value(x);
      e_p_ext2 += w * dpe * dpe;
    }
  }

  double e_l2 = 0.0;
  for (int t : ctx.active.cut_elements) {
    const BoundaryQuadrature& q = bnd_quad[static_cast<size_t>(t)];
    if (ctx.dofs.multiplier_components == 2) {
      const Vec2 lam{
          solution.multiplier[ctx.dofs.multiplier_dof(t, 0) - ctx.dofs.multiplier_offset],
          solution.multiplier[ctx.dofs.multiplier_dof(t, 1) - ctx.dofs.multiplier_offset]};
      for (size_t i = 0; i < q.points.size(); ++i) {
        const Vec2 dl = lam - exact.boundary_stress(q.points[i], q.normals[i]);
        e_l2 += q.weights[i] * dl.squared_norm();
      }
    } else {
      // Scalar boundary pressure: measured against the exact pressure trace.
      const double rho =
          solution.multiplier[ctx.dofs.multiplier_dof(t, 0) - ctx.dofs.multiplier_offset];
      for (size_t i = 0; i < q.points.size(); ++i) {
        const double d = rho - exact.pressure.value(q.points[i]);
        e_l2 += q.weights[i] * d * d;
      }
    }
  }

  rep.e_u_L2 = std::sqrt(e_u2);
  rep.e_u_H1_semi = std::sqrt(e_grad2);
  rep.e_u_H1 = std::sqrt(e_u2 + e_grad2);
  rep.e_p_interior = std::sqrt(e_p_int2);
  rep.e_p_extended = std::sqrt(e_p_ext2);
  rep.e_lambda_L2Gamma = std::sqrt(e_l2);

  const DivergenceField div = compute_divergence_field(ctx, solution.velocity);
  rep.div_max = div.max_abs;
  rep.u_H1_norm = velocity_h1_norm_mesh_domain(ctx, solution.velocity);
  return rep;
}

}  // namespace cutstokes
