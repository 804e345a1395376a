#include "cutstokes/spaces.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <stdexcept>

namespace cutstokes {

namespace {

/// Affine function through three point-value pairs, as {c0, cx, cy}.
std::array<double, 3> affine_through(const Vec2& p0, double v0, const Vec2& p1, double v1,
                                     const Vec2& p2, double v2) {
  const double det = (p1 - p0).cross(p2 - p0);
  const double cx = ((v1 - v0) * (p2.y - p0.y) - (v2 - v0) * (p1.y - p0.y)) / det;
  const double cy = ((v2 - v0) * (p1.x - p0.x) - (v1 - v0) * (p2.x - p0.x)) / det;
  return {v0 - cx * p0.x - cy * p0.y, cx, cy};
}

void set_component(LocalShapeFunction& f, int sub, int comp, const std::array<double, 3>& a) {
  f.coef[static_cast<size_t>(sub)][static_cast<size_t>(comp)] = a;
  f.grad[static_cast<size_t>(sub)](comp, 0) = a[1];
  f.grad[static_cast<size_t>(sub)](comp, 1) = a[2];
}

/// Nodal value layout of a sub-triangle: corner c of sub-triangle s belongs to
/// the macro node set {v_0, v_1, v_2, x_F0, x_F1, x_F2, x_T} and the scalar
/// bubbles are defined through values at these nodes.
int macro_node_of(int sub, int corner) {
  const int k = sub / 2;
  if (corner == 2) return 6;                        // x_T
  if (sub % 2 == 0) return corner == 0 ? k : 3 + k; // (v_k, x_F_k, x_T)
  return corner == 0 ? 3 + k : (k + 1) % 3;         // (x_F_k, v_{k+1}, x_T)
}

}  // namespace

double face_bubble_divergence(const MacroPartition& part, int face_local_index) {
  return (1.0 / 3.0) / (part.x_F[static_cast<size_t>(face_local_index)] - part.x_T).norm();
}

LocalShapeFunction build_face_bubble(const MacroPartition& part, int face_local_index) {
  const int k = face_local_index;
  const Vec2 x_T = part.x_T;
  const Vec2 x_F = part.x_F[static_cast<size_t>(k)];
  // The vertex opposite face k is corner 0 of sub-triangle 2((k+2) mod 3).
  const Vec2 v_opp = part.sub_triangles[static_cast<size_t>(2 * ((k + 2) % 3))][0];

  const double dist = (x_F - x_T).norm();
  const Vec2 nu = (x_F - x_T) / dist;
  const Vec2 beta = (x_T - v_opp) * ((1.0 / 3.0) / dist);

  LocalShapeFunction f;
  std::array<double, 7> phi_T_values{0, 0, 0, 0, 0, 0, 1};
  std::array<double, 7> phi_F_values{0, 0, 0, 0, 0, 0, 0};
  phi_F_values[static_cast<size_t>(3 + k)] = 1.0;

  for (int s = 0; s < 6; ++s) {
    const auto& st = part.sub_triangles[static_cast<size_t>(s)];
    std::array<double, 3> vT, vF;
    for (int c = 0; c < 3; ++c) {
      const int node = macro_node_of(s, c);
      vT[static_cast<size_t>(c)] = phi_T_values[static_cast<size_t>(node)];
      vF[static_cast<size_t>(c)] = phi_F_values[static_cast<size_t>(node)];
    }
    const auto aT = affine_through(st[0], vT[0], st[1], vT[1], st[2], vT[2]);
    const auto aF = affine_through(st[0], vF[0], st[1], vF[1], st[2], vF[2]);
    for (int comp = 0; comp < 2; ++comp) {
      const double nu_c = comp == 0 ? nu.x : nu.y;
      const double beta_c = comp == 0 ? beta.x : beta.y;
      set_component(f, s, comp,
                    {nu_c * aF[0] + beta_c * aT[0], nu_c * aF[1] + beta_c * aT[1],
                     nu_c * aF[2] + beta_c * aT[2]});
    }
  }
  f.divergence = f.grad[0].trace();
  return f;
}

std::vector<MacroElementBasis> build_element_bases(const BackgroundMesh& mesh,
                                                   const ActiveMesh& active,
                                                   const std::vector<MacroPartition>& partitions) {
  std::vector<MacroElementBasis> bases(static_cast<size_t>(mesh.num_triangles()));
  for (int t : active.active_elements) {
    MacroElementBasis& basis = bases[static_cast<size_t>(t)];
    basis.element_id = t;
    const MacroPartition& part = partitions[static_cast<size_t>(t)];
    const auto& tv = mesh.tri(t);
    const std::array<Vec2, 3> v{mesh.vertex(tv[0]), mesh.vertex(tv[1]), mesh.vertex(tv[2])};

    // Vertex modes: standard barycentric hats, affine on the whole element.
    for (int i = 0; i < 3; ++i) {
      const auto hat = affine_through(v[0], i == 0 ? 1.0 : 0.0, v[1], i == 1 ? 1.0 : 0.0, v[2],
                                      i == 2 ? 1.0 : 0.0);
      for (int comp = 0; comp < 2; ++comp) {
        LocalShapeFunction& f = basis.fn[static_cast<size_t>(2 * i + comp)];
        for (int s = 0; s < 6; ++s) set_component(f, s, comp, hat);
        f.divergence = f.grad[0].trace();
      }
    }

    // Face bubbles with the global orientation: the owner element (lowest
    // active index adjacent to the face) carries sign +1.
    for (int k = 0; k < 3; ++k) {
      const int fid = mesh.triangle_faces[static_cast<size_t>(t)][static_cast<size_t>(k)];
      const Face& fc = mesh.faces[static_cast<size_t>(fid)];
      int owner = fc.tri0;
      if (!active.is_active(fc.tri0)) owner = fc.tri1;
      const double sign = owner == t ? 1.0 : -1.0;
      LocalShapeFunction f = build_face_bubble(part, k);
      if (sign < 0.0) {
        for (int s = 0; s < 6; ++s) {
          for (int comp = 0; comp < 2; ++comp) {
            for (int a = 0; a < 3; ++a) f.coef[static_cast<size_t>(s)][static_cast<size_t>(comp)][static_cast<size_t>(a)] *= -1.0;
          }
          f.grad[static_cast<size_t>(s)] = f.grad[static_cast<size_t>(s)] * -1.0;
        }
        f.divergence = -f.divergence;
      }
      basis.fn[static_cast<size_t>(6 + k)] = f;
    }
  }
  return bases;
}

DofMap build_dof_map(const BackgroundMesh& mesh, const ActiveMesh& active,
                     int multiplier_components) {
  DofMap d;
  d.multiplier_components = multiplier_components;
  d.vertex_index.assign(static_cast<size_t>(mesh.num_vertices()), -1);
  for (int v : active.active_vertices) d.vertex_index[static_cast<size_t>(v)] = d.n_active_vertices++;
  d.face_index.assign(static_cast<size_t>(mesh.num_faces()), -1);
  for (int f : active.all_faces_active) d.face_index[static_cast<size_t>(f)] = d.n_active_faces++;
  d.element_index.assign(static_cast<size_t>(mesh.num_triangles()), -1);
  for (int t : active.active_elements) d.element_index[static_cast<size_t>(t)] = d.n_active_elements++;
  d.cut_element_index.assign(static_cast<size_t>(mesh.num_triangles()), -1);
  for (int t : active.cut_elements) d.cut_element_index[static_cast<size_t>(t)] = d.n_cut_elements++;

  d.velocity_offset = 0;
  d.pressure_offset = 2 * d.n_active_vertices + d.n_active_faces;
  d.multiplier_offset = d.pressure_offset + d.n_active_elements;
  d.total = d.multiplier_offset + multiplier_components * d.n_cut_elements;
  return d;
}

std::array<int, 9> element_velocity_dofs(const BackgroundMesh& mesh, const DofMap& dofs,
                                         int element) {
  std::array<int, 9> g;
  const auto& tv = mesh.tri(element);
  for (int i = 0; i < 3; ++i) {
    g[static_cast<size_t>(2 * i)] = dofs.vertex_dof(tv[i], 0);
    g[static_cast<size_t>(2 * i + 1)] = dofs.vertex_dof(tv[i], 1);
  }
  for (int k = 0; k < 3; ++k) {
    g[static_cast<size_t>(6 + k)] =
        dofs.face_dof(mesh.triangle_faces[static_cast<size_t>(element)][static_cast<size_t>(k)]);
  }
  return g;
}

VelocitySample eval_velocity(const BackgroundMesh& mesh, const DofMap& dofs,
                             const std::vector<MacroPartition>& partitions,
                             const std::vector<MacroElementBasis>& bases,
                             const Eigen::VectorXd& velocity_dofs, int element, const Vec2& p) {
  const MacroPartition& part = partitions[static_cast<size_t>(element)];
  const MacroElementBasis& basis = bases[static_cast<size_t>(element)];
  const int sub = locate_sub_triangle(part, p, 1e-10);
  const std::array<int, 9> g = element_velocity_dofs(mesh, dofs, element);
  VelocitySample out;
  for (int i = 0; i < 9; ++i) {
    const double c = velocity_dofs[g[static_cast<size_t>(i)]];
    if (c == 0.0) continue;
    const LocalShapeFunction& f = basis.fn[static_cast<size_t>(i)];
    out.value += f.value(sub, p) * c;
    out.gradient += f.grad[static_cast<size_t>(sub)] * c;
    out.divergence += f.divergence * c;
  }
  return out;
}

double element_divergence(const BackgroundMesh& mesh, const DofMap& dofs,
                          const std::vector<MacroElementBasis>& bases,
                          const Eigen::VectorXd& velocity_dofs, int element) {
  const MacroElementBasis& basis = bases[static_cast<size_t>(element)];
  const std::array<int, 9> g = element_velocity_dofs(mesh, dofs, element);
  double div = 0.0;
  for (int i = 0; i < 9; ++i)
    div += velocity_dofs[g[static_cast<size_t>(i)]] * basis.fn[static_cast<size_t>(i)].divergence;
  return div;
}

double continuity_audit(const BackgroundMesh& mesh, const ActiveMesh& active,
                        const std::vector<MacroPartition>& partitions,
                        const std::vector<MacroElementBasis>& bases, const DofMap& dofs) {
  constexpr std::array<double, 5> sample{0.1, 0.3, 0.5, 0.7, 0.9};
  double max_jump = 0.0;
  for (int f : active.all_faces_active) {
    const Face& fc = mesh.faces[static_cast<size_t>(f)];
    if (fc.tri1 < 0 || !active.is_active(fc.tri0) || !active.is_active(fc.tri1)) continue;
    const Vec2 a = mesh.vertex(fc.vertices[0]);
    const Vec2 b = mesh.vertex(fc.vertices[1]);
    int local = -1;
    for (int k = 0; k < 3; ++k) {
      if (mesh.triangle_faces[static_cast<size_t>(fc.tri0)][static_cast<size_t>(k)] == f) local = k;
    }
    assert(local >= 0);
    const Vec2 x_F = partitions[static_cast<size_t>(fc.tri0)].x_F[static_cast<size_t>(local)];

    const std::array<std::array<Vec2, 2>, 2> sub_edges{{{a, x_F}, {x_F, b}}};
    for (const auto& edge : sub_edges) {
      for (double s : sample) {
        const Vec2 p = edge[0] + (edge[1] - edge[0]) * s;
        std::map<int, Vec2> trace0, trace1;
        for (int side = 0; side < 2; ++side) {
          const int t = side == 0 ? fc.tri0 : fc.tri1;
          const std::array<int, 9> g = element_velocity_dofs(mesh, dofs, t);
          const int sub = locate_sub_triangle(partitions[static_cast<size_t>(t)], p, 1e-9);
          for (int i = 0; i < 9; ++i) {
            const Vec2 val = bases[static_cast<size_t>(t)].fn[static_cast<size_t>(i)].value(sub, p);
            (side == 0 ? trace0 : trace1)[g[static_cast<size_t>(i)]] += val;
          }
        }
        for (const auto& [dof, v0] : trace0) {
          const auto it = trace1.find(dof);
          const Vec2 v1 = it == trace1.end() ? Vec2{0, 0} : it->second;
          max_jump = std::max(max_jump, (v0 - v1).norm());
        }
        for (const auto& [dof, v1] : trace1) {
          if (trace0.find(dof) == trace0.end()) max_jump = std::max(max_jump, v1.norm());
        }
      }
    }
  }
  return max_jump;
}

}  // namespace cutstokes
