#include "cutstokes/interpolation.hpp"

#include <Eigen/Dense>
#include <array>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace cutstokes {

namespace {

/// L2 projection of v onto the linears of element t, returned as the three
/// nodal coefficients (value at vertex i). The mass matrix of barycentric
/// hats is |T|/12 (2 on the diagonal, 1 off); the moments use a degree-4 rule
/// on the macro sub-triangles.
std::array<Vec2, 3> element_p1_projection(const BackgroundMesh& mesh,
                                          const MacroPartition& part, int t,
                                          const VectorField& v) {
  const auto& tv = mesh.tri(t);
  const std::array<Vec2, 3> vert{mesh.vertex(tv[0]), mesh.vertex(tv[1]), mesh.vertex(tv[2])};
  const double area = mesh.area(t);

  Eigen::Matrix3d M;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) M(i, j) = area / 12.0 * (i == j ? 2.0 : 1.0);

  const TriangleRule rule = triangle_rule(4);
  Eigen::Matrix<double, 3, 2> b = Eigen::Matrix<double, 3, 2>::Zero();
  const double inv2a = 1.0 / (2.0 * area);
  for (int s = 0; s < 6; ++s) {
    const auto& st = part.sub_triangles[static_cast<size_t>(s)];
    const double sa = signed_area(st[0], st[1], st[2]);
    for (size_t qi = 0; qi < rule.weights.size(); ++qi) {
      const auto& l = rule.barycentric[qi];
      const Vec2 p = st[0] * l[0] + st[1] * l[1] + st[2] * l[2];
      const double w = rule.weights[qi] * sa;
      const Vec2 val = v.value(p);
      for (int i = 0; i < 3; ++i) {
        const double lambda =
            signed_area(p, vert[static_cast<size_t>((i + 1) % 3)], vert[static_cast<size_t>((i + 2) % 3)]) *
            2.0 * inv2a;
        b(i, 0) += w * lambda * val.x;
        b(i, 1) += w * lambda * val.y;
      }
    }
  }
  const Eigen::Matrix<double, 3, 2> c = M.ldlt().solve(b);
  return {Vec2{c(0, 0), c(0, 1)}, Vec2{c(1, 0), c(1, 1)}, Vec2{c(2, 0), c(2, 1)}};
}

}  // namespace

std::vector<Vec2> clement_interpolate(const BackgroundMesh& mesh, const ActiveMesh& active,
                                      const std::vector<MacroPartition>& partitions,
                                      const VectorField& v) {
  std::vector<Vec2> sum(static_cast<size_t>(mesh.num_vertices()), Vec2{0, 0});
  std::vector<double> weight(static_cast<size_t>(mesh.num_vertices()), 0.0);
  for (int t : active.active_elements) {
    const auto proj = element_p1_projection(mesh, partitions[static_cast<size_t>(t)], t, v);
    const double area = mesh.area(t);
    const auto& tv = mesh.tri(t);
    for (int i = 0; i < 3; ++i) {
      sum[static_cast<size_t>(tv[i])] += proj[static_cast<size_t>(i)] * area;
      weight[static_cast<size_t>(tv[i])] += area;
    }
  }
  std::vector<Vec2> out(static_cast<size_t>(mesh.num_vertices()), Vec2{0, 0});
  for (int vtx : active.active_vertices)
    out[static_cast<size_t>(vtx)] = sum[static_cast<size_t>(vtx)] / weight[static_cast<size_t>(vtx)];
  return out;
}

namespace {

/// Face geometry shared by the flux routines: endpoints, the face point x_F
/// and the owner element carrying the +1 bubble orientation.
struct FaceFrame {
  Vec2 a, b, x_F, normal;
  int owner;
};

FaceFrame face_frame(const BackgroundMesh& mesh, const ActiveMesh& active,
                     const std::vector<MacroPartition>& partitions, int face) {
  const Face& fc = mesh.faces[static_cast<size_t>(face)];
  FaceFrame fr;
  fr.a = mesh.vertex(fc.vertices[0]);
  fr.b = mesh.vertex(fc.vertices[1]);
  fr.normal = mesh.face_normal(face);
  fr.owner = active.is_active(fc.tri0) ? fc.tri0 : fc.tri1;
  const MacroPartition& part = partitions[static_cast<size_t>(fr.owner)];
  int local = -1;
  for (int k = 0; k < 3; ++k)
    if (mesh.triangle_faces[static_cast<size_t>(fr.owner)][static_cast<size_t>(k)] == face) local = k;
  assert(local >= 0);
  fr.x_F = part.x_F[static_cast<size_t>(local)];
  return fr;
}

}  // namespace

double analytic_face_flux(const BackgroundMesh& mesh, const ActiveMesh& active,
                          const std::vector<MacroPartition>& partitions, const VectorField& v,
                          int face) {
  const FaceFrame fr = face_frame(mesh, active, partitions, face);
  const SegmentRule rule = segment_rule(9);  // 5-point Gauss
  double flux = 0.0;
  const std::array<std::array<Vec2, 2>, 2> sub_edges{{{fr.a, fr.x_F}, {fr.x_F, fr.b}}};
  for (const auto& e : sub_edges) {
    const double len = (e[1] - e[0]).norm();
    for (size_t g = 0; g < rule.nodes.size(); ++g) {
      const Vec2 p = e[0] + (e[1] - e[0]) * rule.nodes[g];
      flux += len * rule.weights[g] * v.value(p).dot(fr.normal);
    }
  }
  return flux;
}

double discrete_face_flux(const BackgroundMesh& mesh, const ActiveMesh& active,
                          const std::vector<MacroPartition>& partitions,
                          const std::vector<MacroElementBasis>& bases, const DofMap& dofs,
                          const Eigen::VectorXd& velocity_dofs, int face) {
  const FaceFrame fr = face_frame(mesh, active, partitions, face);
  // The trace is linear on each sub-edge; the trapezoid value is exact.
  auto value = [&](const Vec2& p) {
    return eval_velocity(mesh, dofs, partitions, bases, velocity_dofs, fr.owner, p).value;
  };
  double flux = 0.0;
  const std::array<std::array<Vec2, 2>, 2> sub_edges{{{fr.a, fr.x_F}, {fr.x_F, fr.b}}};
  for (const auto& e : sub_edges) {
    const double len = (e[1] - e[0]).norm();
    const Vec2 mid = (value(e[0]) + value(e[1])) * 0.5;
    flux += len * mid.dot(fr.normal);
  }
  return flux;
}

Eigen::VectorXd interpolate_velocity(const BackgroundMesh& mesh, const ActiveMesh& active,
                                     const std::vector<MacroPartition>& partitions,
                                     const std::vector<MacroElementBasis>& bases,
                                     const DofMap& dofs, const VectorField& v) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(dofs.n_velocity());
  const std::vector<Vec2> vertex_values = clement_interpolate(mesh, active, partitions, v);
  for (int vtx : active.active_vertices) {
    u[dofs.vertex_dof(vtx, 0)] = vertex_values[static_cast<size_t>(vtx)].x;
    u[dofs.vertex_dof(vtx, 1)] = vertex_values[static_cast<size_t>(vtx)].y;
  }
  for (int f : active.all_faces_active) {
    const FaceFrame fr = face_frame(mesh, active, partitions, f);
    const Face& fc = mesh.faces[static_cast<size_t>(f)];
    const Vec2 wa = vertex_values[static_cast<size_t>(fc.vertices[0])];
    const Vec2 wb = vertex_values[static_cast<size_t>(fc.vertices[1])];
    const double len = (fr.b - fr.a).norm();
    const double p1_flux = len * ((wa + wb) * 0.5).dot(fr.normal);
    const double target = analytic_face_flux(mesh, active, partitions, v, f);
    // Bubble flux through the face from the owner side (sign +1 there).
    const MacroPartition& part = partitions[static_cast<size_t>(fr.owner)];
    const Vec2 nu = (fr.x_F - part.x_T).normalized();
    const double bubble_flux = nu.dot(fr.normal) * len / 2.0;
    assert(std::abs(bubble_flux) > 0.0);
    u[dofs.face_dof(f)] = (target - p1_flux) / bubble_flux;
  }
  return u;
}

Eigen::VectorXd interpolate_velocity_no_bubbles(const BackgroundMesh& mesh,
                                                const ActiveMesh& active,
                                                const std::vector<MacroPartition>& partitions,
                                                const DofMap& dofs, const VectorField& v) {
  (void)partitions;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(dofs.n_velocity());
  for (int vtx : active.active_vertices) {
    const Vec2 val = v.value(mesh.vertex(vtx));
    u[dofs.vertex_dof(vtx, 0)] = val.x;
    u[dofs.vertex_dof(vtx, 1)] = val.y;
  }
  return u;
}

Eigen::VectorXd project_pressure(const BackgroundMesh& mesh, const ActiveMesh& active,
                                 const DofMap& dofs,
                                 const std::vector<CutCellQuadrature>& cut_quad,
                                 const ScalarField& p) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dofs.n_pressure());
  for (int t : active.active_elements) {
    const CutCellQuadrature& q = cut_quad[static_cast<size_t>(t)];
    double integral = 0.0;
    for (size_t i = 0; i < q.weights.size(); ++i) integral += q.weights[i] * p.value(q.points[i]);
    out[dofs.pressure_dof(t) - dofs.pressure_offset] = integral / mesh.area(t);
  }
  return out;
}

Eigen::VectorXd project_multiplier(const BackgroundMesh& mesh, const ActiveMesh& active,
                                   const DofMap& dofs,
                                   const std::vector<BoundaryQuadrature>& boundary_quad,
                                   const VectorField& mu) {
  (void)mesh;
  if (dofs.multiplier_components != 2)
    throw std::invalid_argument("project_multiplier: expects the vector multiplier space");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dofs.n_multiplier());
  for (int t : active.cut_elements) {
    const BoundaryQuadrature& q = boundary_quad[static_cast<size_t>(t)];
    if (q.points.empty())
      throw std::runtime_error("project_multiplier: cut element without boundary quadrature");
    Vec2 integral{0, 0};
    double length = 0.0;
    for (size_t i = 0; i < q.weights.size(); ++i) {
      integral += mu.value(q.points[i]) * q.weights[i];
      length += q.weights[i];
    }
    const Vec2 mean = integral / length;
    out[dofs.multiplier_dof(t, 0) - dofs.multiplier_offset] = mean.x;
    out[dofs.multiplier_dof(t, 1) - dofs.multiplier_offset] = mean.y;
  }
  return out;
}

}  // namespace cutstokes
