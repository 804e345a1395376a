#include "cutstokes/assembly.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cutstokes {

namespace {

using Triplet = Eigen::Triplet<double>;

SparseMat from_triplets(int n, std::vector<Triplet>& trips) {
  SparseMat K(n, n);
  K.setFromTriplets(trips.begin(), trips.end());
  return K;
}

/// Fragment areas per macro sub-triangle, accumulated from the cut rule.
std::array<double, 6> sub_areas(const CutCellQuadrature& q) {
  std::array<double, 6> area{0, 0, 0, 0, 0, 0};
  for (size_t i = 0; i < q.weights.size(); ++i)
    area[static_cast<size_t>(q.sub_tri[i])] += q.weights[i];
  return area;
}

double face_h(const BackgroundMesh& mesh, int face) {
  const Face& fc = mesh.faces[static_cast<size_t>(face)];
  if (fc.tri1 < 0) return mesh.h_T[static_cast<size_t>(fc.tri0)];
  return 0.5 * (mesh.h_T[static_cast<size_t>(fc.tri0)] + mesh.h_T[static_cast<size_t>(fc.tri1)]);
}

}  // namespace

SparseMat assemble_viscous(const AssemblyContext& ctx) {
  std::vector<Triplet> trips;
  for (int t : ctx.active.active_elements) {
    const auto area = sub_areas(ctx.cut_quad[static_cast<size_t>(t)]);
    const MacroElementBasis& basis = ctx.bases[static_cast<size_t>(t)];
    const std::array<int, 9> g = element_velocity_dofs(ctx.mesh, ctx.dofs, t);
    for (int i = 0; i < 9; ++i) {
      for (int j = 0; j < 9; ++j) {
        double v = 0.0;
        for (int s = 0; s < 6; ++s) {
          if (area[static_cast<size_t>(s)] == 0.0) continue;
          v += area[static_cast<size_t>(s)] *
               basis.fn[static_cast<size_t>(i)].grad[static_cast<size_t>(s)].ddot(
                   basis.fn[static_cast<size_t>(j)].grad[static_cast<size_t>(s)]);
        }
        if (v != 0.0) trips.emplace_back(g[static_cast<size_t>(i)], g[static_cast<size_t>(j)], v);
      }
    }
  }
  return from_triplets(ctx.dofs.total, trips);
}

SparseMat assemble_velocity_pressure(const AssemblyContext& ctx) {
  std::vector<Triplet> trips;
  for (int t : ctx.active.active_elements) {
    const double area = ctx.mesh.area(t);
    const MacroElementBasis& basis = ctx.bases[static_cast<size_t>(t)];
    const std::array<int, 9> g = element_velocity_dofs(ctx.mesh, ctx.dofs, t);
    const int pdof = ctx.dofs.pressure_dof(t);
    for (int i = 0; i < 9; ++i) {
      const double v = basis.fn[static_cast<size_t>(i)].divergence * area;
      trips.emplace_back(pdof, g[static_cast<size_t>(i)], v);   // +b_h(q, u)
      trips.emplace_back(g[static_cast<size_t>(i)], pdof, -v);  // -b_h(p, v)
    }
  }
  return from_triplets(ctx.dofs.total, trips);
}

SparseMat assemble_boundary_coupling(const AssemblyContext& ctx) {
  assert(ctx.dofs.multiplier_components == 2);
  std::vector<Triplet> trips;
  for (int t : ctx.active.cut_elements) {
    const BoundaryQuadrature& q = ctx.boundary_quad[static_cast<size_t>(t)];
    const MacroElementBasis& basis = ctx.bases[static_cast<size_t>(t)];
    const std::array<int, 9> g = element_velocity_dofs(ctx.mesh, ctx.dofs, t);
    const std::array<int, 2> l{ctx.dofs.multiplier_dof(t, 0), ctx.dofs.multiplier_dof(t, 1)};
    for (size_t p = 0; p < q.points.size(); ++p) {
      for (int i = 0; i < 9; ++i) {
        const Vec2 val =
            basis.fn[static_cast<size_t>(i)].value(q.sub_tri[p], q.points[p]) * q.weights[p];
        trips.emplace_back(g[static_cast<size_t>(i)], l[0], val.x);   // +c(lambda, v)
        trips.emplace_back(l[0], g[static_cast<size_t>(i)], -val.x);  // -c(mu, u)
        trips.emplace_back(g[static_cast<size_t>(i)], l[1], val.y);
        trips.emplace_back(l[1], g[static_cast<size_t>(i)], -val.y);
      }
    }
  }
  return from_triplets(ctx.dofs.total, trips);
}

SparseMat assemble_multiplier_stabilization(const AssemblyContext& ctx) {
  assert(ctx.dofs.multiplier_components == 2);
  std::vector<Triplet> trips;
  for (int f : ctx.active.interior_faces_cut) {
    const Face& fc = ctx.mesh.faces[static_cast<size_t>(f)];
    const double coeff = face_h(ctx.mesh, f) * ctx.mesh.face_length(f);
    for (int c = 0; c < 2; ++c) {
      const int l0 = ctx.dofs.multiplier_dof(fc.tri0, c);
      const int l1 = ctx.dofs.multiplier_dof(fc.tri1, c);
      trips.emplace_back(l0, l0, coeff);
      trips.emplace_back(l1, l1, coeff);
      trips.emplace_back(l0, l1, -coeff);
      trips.emplace_back(l1, l0, -coeff);
    }
  }
  return from_triplets(ctx.dofs.total, trips);
}

SparseMat assemble_curl_stabilization(const AssemblyContext& ctx) {
  std::vector<Triplet> trips;
  for (int t : ctx.active.cut_elements) {
    const MacroPartition& part = ctx.partitions[static_cast<size_t>(t)];
    const MacroElementBasis& basis = ctx.bases[static_cast<size_t>(t)];
    const std::array<int, 9> g = element_velocity_dofs(ctx.mesh, ctx.dofs, t);
    const double h2 = ctx.mesh.h_T[static_cast<size_t>(t)] * ctx.mesh.h_T[static_cast<size_t>(t)];
    std::array<std::array<double, 6>, 9> curl;
    for (int i = 0; i < 9; ++i) {
      for (int s = 0; s < 6; ++s) {
        const Mat2& G = basis.fn[static_cast<size_t>(i)].grad[static_cast<size_t>(s)];
        curl[static_cast<size_t>(i)][static_cast<size_t>(s)] = G(1, 0) - G(0, 1);
      }
    }
    for (int i = 0; i < 9; ++i) {
      for (int j = 0; j < 9; ++j) {
        double v = 0.0;
        for (int s = 0; s < 6; ++s) {
          v += part.sub_area(s) * curl[static_cast<size_t>(i)][static_cast<size_t>(s)] *
               curl[static_cast<size_t>(j)][static_cast<size_t>(s)];
        }
        if (v != 0.0)
          trips.emplace_back(g[static_cast<size_t>(i)], g[static_cast<size_t>(j)], h2 * v);
      }
    }
  }
  return from_triplets(ctx.dofs.total, trips);
}

SparseMat assemble_coriolis(const AssemblyContext& ctx, double omega) {
  std::vector<Triplet> trips;
  if (omega != 0.0) {
    for (int t : ctx.active.active_elements) {
      const CutCellQuadrature& q = ctx.cut_quad[static_cast<size_t>(t)];
      const MacroElementBasis& basis = ctx.bases[static_cast<size_t>(t)];
      const std::array<int, 9> g = element_velocity_dofs(ctx.mesh, ctx.dofs, t);
      for (size_t p = 0; p < q.points.size(); ++p) {
        std::array<Vec2, 9> val;
        for (int i = 0; i < 9; ++i)
          val[static_cast<size_t>(i)] =
              basis.fn[static_cast<size_t>(i)].value(q.sub_tri[p], q.points[p]);
        const double w = 2.0 * omega * q.weights[p];
        for (int i = 0; i < 9; ++i) {
          for (int j = 0; j < 9; ++j) {
            // (2 omega x u, v) with u = trial j, v = test i.
            const double v = w * val[static_cast<size_t>(j)].cross(val[static_cast<size_t>(i)]);
            if (v != 0.0)
              trips.emplace_back(g[static_cast<size_t>(i)], g[static_cast<size_t>(j)], v);
          }
        }
      }
    }
  }
  return from_triplets(ctx.dofs.total, trips);
}

Eigen::VectorXd assemble_rhs(const AssemblyContext& ctx, const VectorField& f,
                             const VectorField& u_gamma) {
  assert(ctx.dofs.multiplier_components == 2);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ctx.dofs.total);
  for (int t : ctx.active.active_elements) {
    const CutCellQuadrature& q = ctx.cut_quad[static_cast<size_t>(t)];
    const MacroElementBasis& basis = ctx.bases[static_cast<size_t>(t)];
    const std::array<int, 9> g = element_velocity_dofs(ctx.mesh, ctx.dofs, t);
    for (size_t p = 0; p < q.points.size(); ++p) {
      const Vec2 fv = f.value(q.points[p]);
      if (fv.x == 0.0 && fv.y == 0.0) continue;
      for (int i = 0; i < 9; ++i) {
        rhs[g[static_cast<size_t>(i)]] +=
            q.weights[p] *
            fv.dot(basis.fn[static_cast<size_t>(i)].value(q.sub_tri[p], q.points[p]));
      }
    }
  }
  // Multiplier rows read -c(mu, u_h) + gamma j(lambda_h, mu) = -l_Gamma(mu).
  for (int t : ctx.active.cut_elements) {
    const BoundaryQuadrature& q = ctx.boundary_quad[static_cast<size_t>(t)];
    for (size_t p = 0; p < q.points.size(); ++p) {
      const Vec2 ug = u_gamma.value(q.points[p]);
      rhs[ctx.dofs.multiplier_dof(t, 0)] -= q.weights[p] * ug.x;
      rhs[ctx.dofs.multiplier_dof(t, 1)] -= q.weights[p] * ug.y;
    }
  }
  return rhs;
}

namespace {

BlockRanges block_ranges(const DofMap& dofs) {
  BlockRanges b;
  b.velocity_begin = 0;
  b.velocity_end = dofs.n_velocity();
  b.pressure_begin = dofs.pressure_offset;
  b.pressure_end = dofs.pressure_offset + dofs.n_pressure();
  b.multiplier_begin = dofs.multiplier_offset;
  b.multiplier_end = dofs.multiplier_offset + dofs.n_multiplier();
  return b;
}

}  // namespace

SaddleSystem build_lagrange_system(const AssemblyContext& ctx, const SystemParameters& params,
                                   const VectorField& f, const VectorField& u_gamma) {
  if (ctx.dofs.multiplier_components != 2)
    throw std::invalid_argument("build_lagrange_system: needs the vector multiplier dof map");
  SaddleSystem sys;
  sys.formulation = Formulation::lagrange;
  sys.params = params;
  sys.blocks = block_ranges(ctx.dofs);
  SparseMat K = assemble_viscous(ctx);
  K += assemble_velocity_pressure(ctx);
  K += assemble_boundary_coupling(ctx);
  if (params.gamma != 0.0) K += SparseMat(params.gamma * assemble_multiplier_stabilization(ctx));
  if (params.curl_weight != 0.0)
    K += SparseMat(params.curl_weight * assemble_curl_stabilization(ctx));
  if (params.omega != 0.0) K += assemble_coriolis(ctx, params.omega);
  sys.matrix = std::move(K);
  sys.matrix.makeCompressed();
  sys.rhs = assemble_rhs(ctx, f, u_gamma);
  if (sys.matrix.rows() != ctx.dofs.total)
    throw std::logic_error("build_lagrange_system: dimension mismatch");
  return sys;
}

SparseMat assemble_nitsche_boundary(const AssemblyContext& ctx, double gamma0) {
  assert(ctx.dofs.multiplier_components == 1);
  std::vector<Triplet> trips;
  for (int t : ctx.active.cut_elements) {
    const BoundaryQuadrature& q = ctx.boundary_quad[static_cast<size_t>(t)];
    const MacroElementBasis& basis = ctx.bases[static_cast<size_t>(t)];
    const std::array<int, 9> g = element_velocity_dofs(ctx.mesh, ctx.dofs, t);
    const int rho = ctx.dofs.multiplier_dof(t, 0);
    const double penalty = gamma0 / ctx.mesh.h_T[static_cast<size_t>(t)];
    for (size_t p = 0; p < q.points.size(); ++p) {
      const double w = q.weights[p];
      const Vec2 n = q.normals[p];
      std::array<Vec2, 9> val;
      std::array<Vec2, 9> flux;  // (grad phi)^T n
      for (int i = 0; i < 9; ++i) {
        val[static_cast<size_t>(i)] =
            basis.fn[static_cast<size_t>(i)].value(q.sub_tri[p], q.points[p]);
        flux[static_cast<size_t>(i)] =
            basis.fn[static_cast<size_t>(i)].grad[static_cast<size_t>(q.sub_tri[p])].apply(n);
      }
      for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
          const double v =
              w * (-val[static_cast<size_t>(i)].dot(flux[static_cast<size_t>(j)]) -
                   val[static_cast<size_t>(j)].dot(flux[static_cast<size_t>(i)]) +
                   penalty * val[static_cast<size_t>(i)].dot(val[static_cast<size_t>(j)]));
          if (v != 0.0)
            trips.emplace_back(g[static_cast<size_t>(i)], g[static_cast<size_t>(j)], v);
        }
        const double vn = w * val[static_cast<size_t>(i)].dot(n);
        trips.emplace_back(g[static_cast<size_t>(i)], rho, vn);   // +(rho, v . n)
        trips.emplace_back(rho, g[static_cast<size_t>(i)], -vn);  // -(varpi, u . n)
      }
    }
  }
  return from_triplets(ctx.dofs.total, trips);
}

SparseMat assemble_scalar_multiplier_stabilization(const AssemblyContext& ctx) {
  assert(ctx.dofs.multiplier_components == 1);
  std::vector<Triplet> trips;
  for (int f : ctx.active.interior_faces_cut) {
    const Face& fc = ctx.mesh.faces[static_cast<size_t>(f)];
    const double coeff = face_h(ctx.mesh, f) * ctx.mesh.face_length(f);
    const int l0 = ctx.dofs.multiplier_dof(fc.tri0, 0);
    const int l1 = ctx.dofs.multiplier_dof(fc.tri1, 0);
    trips.emplace_back(l0, l0, coeff);
    trips.emplace_back(l1, l1, coeff);
    trips.emplace_back(l0, l1, -coeff);
    trips.emplace_back(l1, l0, -coeff);
  }
  return from_triplets(ctx.dofs.total, trips);
}

SparseMat assemble_gradient_jump_penalty(const AssemblyContext& ctx) {
  std::vector<Triplet> trips;
  for (int f : ghost_penalty_faces(ctx.mesh, ctx.active)) {
    const Face& fc = ctx.mesh.faces[static_cast<size_t>(f)];
    const double hf = face_h(ctx.mesh, f);
    const Vec2 a = ctx.mesh.vertex(fc.vertices[0]);
    const Vec2 b = ctx.mesh.vertex(fc.vertices[1]);

    // Locate the face inside each neighbor and find which sub-triangle backs
    // each of the two face sub-edges [a, x_F] and [x_F, b].
    std::array<int, 2> tris{fc.tri0, fc.tri1};
    std::array<int, 2> local{-1, -1};
    for (int side = 0; side < 2; ++side) {
      for (int k = 0; k < 3; ++k) {
        if (ctx.mesh.triangle_faces[static_cast<size_t>(tris[static_cast<size_t>(side)])]
                                   [static_cast<size_t>(k)] == f)
          local[static_cast<size_t>(side)] = k;
      }
      assert(local[static_cast<size_t>(side)] >= 0);
    }
    const Vec2 x_F = ctx.partitions[static_cast<size_t>(tris[0])].x_F[static_cast<size_t>(local[0])];
    const std::array<double, 2> sub_len{(x_F - a).norm(), (b - x_F).norm()};

    for (int e = 0; e < 2; ++e) {  // sub-edge 0 = [a, x_F], 1 = [x_F, b]
      // Accumulate the gradient jump of every global dof on this sub-edge.
      std::vector<std::pair<int, Mat2>> jump;
      for (int side = 0; side < 2; ++side) {
        const int t = tris[static_cast<size_t>(side)];
        const int k = local[static_cast<size_t>(side)];
        const bool k_starts_at_a = ctx.mesh.tri(t)[k] == fc.vertices[0];
        const int sub = 2 * k + ((e == 0) == k_starts_at_a ? 0 : 1);
        const std::array<int, 9> g = element_velocity_dofs(ctx.mesh, ctx.dofs, t);
        const double sign = side == 0 ? 1.0 : -1.0;
        for (int i = 0; i < 9; ++i) {
          const Mat2 G =
              ctx.bases[static_cast<size_t>(t)].fn[static_cast<size_t>(i)].grad[static_cast<size_t>(sub)] *
              sign;
          auto it = std::find_if(jump.begin(), jump.end(),
                                 [&](const auto& pr) { return pr.first == g[static_cast<size_t>(i)]; });
          if (it == jump.end()) {
            jump.emplace_back(g[static_cast<size_t>(i)], G);
          } else {
            it->second += G;
          }
        }
      }
      const double coeff = hf * sub_len[static_cast<size_t>(e)];
      for (const auto& [gi, Gi] : jump) {
        for (const auto& [gj, Gj] : jump) {
          const double v = coeff * Gi.ddot(Gj);
          if (v != 0.0) trips.emplace_back(gi, gj, v);
        }
      }
    }
  }
  return from_triplets(ctx.dofs.total, trips);
}

Eigen::VectorXd assemble_nitsche_rhs(const AssemblyContext& ctx, double gamma0,
                                     const VectorField& f, const VectorField& u_gamma) {
  assert(ctx.dofs.multiplier_components == 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ctx.dofs.total);
  for (int t : ctx.active.active_elements) {
    const CutCellQuadrature& q = ctx.cut_quad[static_cast<size_t>(t)];
    const MacroElementBasis& basis = ctx.bases[static_cast<size_t>(t)];
    const std::array<int, 9> g = element_velocity_dofs(ctx.mesh, ctx.dofs, t);
    for (size_t p = 0; p < q.points.size(); ++p) {
      const Vec2 fv = f.value(q.points[p]);
      if (fv.x == 0.0 && fv.y == 0.0) continue;
      for (int i = 0; i < 9; ++i) {
        rhs[g[static_cast<size_t>(i)]] +=
            q.weights[p] *
            fv.dot(basis.fn[static_cast<size_t>(i)].value(q.sub_tri[p], q.points[p]));
      }
    }
  }
  for (int t : ctx.active.cut_elements) {
    const BoundaryQuadrature& q = ctx.boundary_quad[static_cast<size_t>(t)];
    const MacroElementBasis& basis = ctx.bases[static_cast<size_t>(t)];
    const std::array<int, 9> g = element_velocity_dofs(ctx.mesh, ctx.dofs, t);
    const int rho = ctx.dofs.multiplier_dof(t, 0);
    const double penalty = gamma0 / ctx.mesh.h_T[static_cast<size_t>(t)];
    for (size_t p = 0; p < q.points.size(); ++p) {
      const double w = q.weights[p];
      const Vec2 n = q.normals[p];
      const Vec2 ug = u_gamma.value(q.points[p]);
      for (int i = 0; i < 9; ++i) {
        const Vec2 val = basis.fn[static_cast<size_t>(i)].value(q.sub_tri[p], q.points[p]);
        const Vec2 flux =
            basis.fn[static_cast<size_t>(i)].grad[static_cast<size_t>(q.sub_tri[p])].apply(n);
        rhs[g[static_cast<size_t>(i)]] += w * (-ug.dot(flux) + penalty * ug.dot(val));
      }
      rhs[rho] -= w * ug.dot(n);
    }
  }
  return rhs;
}

SaddleSystem build_nitsche_system(const AssemblyContext& ctx, const SystemParameters& params,
                                  const VectorField& f, const VectorField& u_gamma) {
  if (ctx.dofs.multiplier_components != 1)
    throw std::invalid_argument("build_nitsche_system: needs the scalar multiplier dof map");
  SaddleSystem sys;
  sys.formulation = Formulation::nitsche;
  sys.params = params;
  sys.blocks = block_ranges(ctx.dofs);
  SparseMat K = assemble_viscous(ctx);
  K += assemble_velocity_pressure(ctx);
  K += assemble_nitsche_boundary(ctx, params.gamma0);
  if (params.gamma1 != 0.0)
    K += SparseMat(params.gamma1 * assemble_scalar_multiplier_stabilization(ctx));
  if (params.gamma2 != 0.0) K += SparseMat(params.gamma2 * assemble_gradient_jump_penalty(ctx));
  sys.matrix = std::move(K);
  sys.matrix.makeCompressed();
  sys.rhs = assemble_nitsche_rhs(ctx, params.gamma0, f, u_gamma);
  return sys;
}

}  // namespace cutstokes
