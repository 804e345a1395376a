#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "cutstokes/assembly.hpp"
#include "cutstokes/discretization.hpp"
#include "cutstokes/fields.hpp"
#include "cutstokes/interpolation.hpp"
#include "cutstokes/solve.hpp"

using namespace cutstokes;

namespace {

constexpr double kPi = std::numbers::pi;

Discretization disk_discretization(int n, Formulation form = Formulation::lagrange,
                                   int quad_order = 2, int boundary_order = 2) {
  return build_discretization(n, Box{{-1, -1}, {1, 1}}, LevelSetGeometry::disk({0, 0}, 0.5), form,
                              quad_order, boundary_order);
}

/// Standalone reference triangle, fully inside a huge disk.
Discretization standalone_triangle() {
  Discretization d{BackgroundMesh{}, LevelSetGeometry::disk({0, 0}, 100.0), {}, {}, {}, {}, {}, {},
                   {}};
  d.mesh.vertices = {{0, 0}, {1, 0}, {0, 1}};
  d.mesh.triangles = {{0, 1, 2}};
  d.mesh.triangle_faces = {{0, 1, 2}};
  d.mesh.faces = {Face{{0, 1}, 0, -1}, Face{{1, 2}, 0, -1}, Face{{0, 2}, 0, -1}};
  d.mesh.h_T = {std::sqrt(2.0)};
  d.classification = classify_elements(d.mesh, d.geom);
  d.active = extract_active_mesh(d.mesh, d.classification);
  d.partitions = build_macro_partition(d.mesh, d.active);
  d.bases = build_element_bases(d.mesh, d.active, d.partitions);
  d.dofs = build_dof_map(d.mesh, d.active, 2);
  d.cut_quad = build_cut_quadrature(d.mesh, d.geom, d.classification, d.partitions, 2);
  d.boundary_quad.resize(1);
  return d;
}

Eigen::VectorXd pad_velocity(const DofMap& dofs, const Eigen::VectorXd& u) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dofs.total);
  x.head(u.size()) = u;
  return x;
}

bool structurally_symmetric(const Eigen::SparseMatrix<double>& K) {
  std::set<std::pair<int, int>> pattern, pattern_t;
  for (int k = 0; k < K.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it) {
      pattern.emplace(it.row(), it.col());
      pattern_t.emplace(it.col(), it.row());
    }
  }
  return pattern == pattern_t;
}

double symmetry_defect(const Eigen::SparseMatrix<double>& K) {
  const Eigen::SparseMatrix<double> D = Eigen::SparseMatrix<double>(K.transpose()) - K;
  double num = 0.0, den = 0.0;
  for (int k = 0; k < D.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(D, k); it; ++it)
      num = std::max(num, std::abs(it.value()));
  for (int k = 0; k < K.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it)
      den = std::max(den, std::abs(it.value()));
  return den == 0.0 ? num : num / den;
}

}  // namespace

TEST_CASE("viscous form: constants, hand oracle, positive semidefinite") {
  const Discretization d = standalone_triangle();
  const AssemblyContext ctx = d.context();
  const SparseMat A = assemble_viscous(ctx);

  // Zero energy for constant fields.
  const Eigen::VectorXd ones = pad_velocity(
      d.dofs, interpolate_velocity(d.mesh, d.active, d.partitions, d.bases, d.dofs,
                                   VectorField::constant({1.0, 0.0})));
  CHECK(std::abs(ones.dot(A * ones)) <= 1e-12);

  // Hand oracle for the vertex-vertex block: closed-form per-sub-triangle
  // integration of the constant hat gradients.
  const auto& tv = d.mesh.tri(0);
  const double area = d.mesh.area(0);
  std::array<Vec2, 3> grad_hat;
  for (int i = 0; i < 3; ++i) {
    const Vec2 va = d.mesh.vertex(tv[(i + 1) % 3]);
    const Vec2 vb = d.mesh.vertex(tv[(i + 2) % 3]);
    grad_hat[static_cast<size_t>(i)] = Vec2{va.y - vb.y, vb.x - va.x} / (2.0 * area);
  }
  const MacroPartition& part = d.partitions[0];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double oracle = 0.0;
      for (int s = 0; s < 6; ++s)
        oracle += part.sub_area(s) *
                  grad_hat[static_cast<size_t>(i)].dot(grad_hat[static_cast<size_t>(j)]);
      for (int c = 0; c < 2; ++c) {
        const double entry = A.coeff(d.dofs.vertex_dof(tv[i], c), d.dofs.vertex_dof(tv[j], c));
        CHECK(entry == doctest::Approx(oracle).epsilon(1e-13));
        // Cross-component coupling vanishes for the weak Laplacian.
        const double cross = A.coeff(d.dofs.vertex_dof(tv[i], c), d.dofs.vertex_dof(tv[j], 1 - c));
        CHECK(std::abs(cross) <= 1e-15);
      }
    }
  }

  // Gram property on the disk configuration.
  const Discretization dd = disk_discretization(8);
  const SparseMat Ad = assemble_viscous(dd.context());
  CHECK(symmetry_defect(Ad) <= 1e-13);
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dd.dofs.total);
    for (int i = 0; i < dd.dofs.n_velocity(); ++i) x[i] = coef(rng);
    CHECK(x.dot(Ad * x) >= -1e-10 * x.squaredNorm());
  }
}

TEST_CASE("pressure-velocity coupling: full elements, bubble entry, exact skew") {
  const Discretization d = standalone_triangle();
  const SparseMat B = assemble_velocity_pressure(d.context());
  const int f = 1;  // face {(1,0),(0,1)} of the standalone triangle
  const double alpha = face_bubble_divergence(d.partitions[0], 1);
  const double entry = B.coeff(d.dofs.pressure_dof(0), d.dofs.face_dof(f));
  CHECK(entry == doctest::Approx(alpha * d.mesh.area(0)).epsilon(1e-13));

  const Discretization dd = disk_discretization(16);
  const SparseMat Bd = assemble_velocity_pressure(dd.context());

  // b_h(q, u) vanishes for the divergence-preserving interpolant of a
  // solenoidal field.
  const ExactStokesSolution exact = boundary_driven_solution();
  const Eigen::VectorXd u = pad_velocity(
      dd.dofs,
      interpolate_velocity(dd.mesh, dd.active, dd.partitions, dd.bases, dd.dofs, exact.velocity));
  const Eigen::VectorXd rows = (Bd * u).segment(dd.dofs.pressure_offset, dd.dofs.n_pressure());
  CHECK(rows.lpNorm<Eigen::Infinity>() <= 1e-11);

  // Exact skew pairing between the two blocks.
  double defect = 0.0;
  for (int k = 0; k < Bd.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(Bd, k); it; ++it) {
      if (it.row() >= dd.dofs.pressure_offset &&
          it.row() < dd.dofs.pressure_offset + dd.dofs.n_pressure()) {
        defect = std::max(defect, std::abs(it.value() + Bd.coeff(it.col(), it.row())));
      }
    }
  }
  CHECK(defect == 0.0);
}

TEST_CASE("pressure-velocity coupling ignores the cut position") {
  // Two nearby radii with identical classifications must give bit-identical
  // coupling blocks: the full-element rule sees only |T| and the divergence.
  const Box box{{-1, -1}, {1, 1}};
  const Vec2 center{0.001, 0.0007};  // keep the grid away from degeneracies
  const Formulation form = Formulation::lagrange;
  const Discretization d0 = build_discretization(16, box, LevelSetGeometry::disk(center, 0.5), form);
  const Discretization d1 =
      build_discretization(16, box, LevelSetGeometry::disk(center, 0.5 * (1.0 + 1e-8)), form);
  REQUIRE(d0.active.labels == d1.active.labels);
  const SparseMat B0 = assemble_velocity_pressure(d0.context());
  const SparseMat B1 = assemble_velocity_pressure(d1.context());
  CHECK((Eigen::SparseMatrix<double>(B0 - B1)).coeffs().size() > 0);
  double max_diff = 0.0;
  const Eigen::SparseMatrix<double> D = B0 - B1;
  for (int k = 0; k < D.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(D, k); it; ++it)
      max_diff = std::max(max_diff, std::abs(it.value()));
  CHECK(max_diff == 0.0);
}

TEST_CASE("boundary coupling: constants, support, exact skew") {
  const Discretization d = disk_discretization(16);
  const SparseMat C = assemble_boundary_coupling(d.context());

  // c(lambda, v) with v = (1,0) interpolant and lambda = (1,0) on every cut
  // element equals the boundary length.
  const Eigen::VectorXd u = pad_velocity(
      d.dofs, interpolate_velocity(d.mesh, d.active, d.partitions, d.bases, d.dofs,
                                   VectorField::constant({1.0, 0.0})));
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(d.dofs.total);
  for (int t : d.active.cut_elements) lam[d.dofs.multiplier_dof(t, 0)] = 1.0;
  CHECK(u.dot(C * lam) == doctest::Approx(kPi).epsilon(2e-3));

  // Columns of velocity dofs with no support on cut elements are empty.
  std::set<int> cut_supported;
  for (int t : d.active.cut_elements) {
    for (int g : element_velocity_dofs(d.mesh, d.dofs, t)) cut_supported.insert(g);
  }
  Eigen::VectorXd far = Eigen::VectorXd::Zero(d.dofs.total);
  for (int i = 0; i < d.dofs.n_velocity(); ++i) {
    if (cut_supported.find(i) == cut_supported.end()) far[i] = 1.0;
  }
  const Eigen::VectorXd mult_rows =
      (C * far).segment(d.dofs.multiplier_offset, d.dofs.n_multiplier());
  CHECK(mult_rows.lpNorm<Eigen::Infinity>() == 0.0);

  // Exact skew pairing.
  double defect = 0.0;
  for (int k = 0; k < C.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(C, k); it; ++it) {
      if (it.row() >= d.dofs.multiplier_offset)
        defect = std::max(defect, std::abs(it.value() + C.coeff(it.col(), it.row())));
    }
  }
  CHECK(defect == 0.0);
}

TEST_CASE("boundary coupling against a dense trapezoid oracle") {
  // High-order boundary rule so the only discrepancy left is the quadrature
  // of smooth-per-piece traces.
  const Discretization d = disk_discretization(16, Formulation::lagrange, 2, 8);
  const SparseMat C = assemble_boundary_coupling(d.context());
  const int t = d.active.cut_elements[d.active.cut_elements.size() / 2];
  const MacroPartition& part = d.partitions[static_cast<size_t>(t)];
  const auto g = element_velocity_dofs(d.mesh, d.dofs, t);
  const double h = d.mesh.h_T[static_cast<size_t>(t)];
  for (int i = 0; i < 9; ++i) {
    for (int c = 0; c < 2; ++c) {
      double oracle = 0.0;
      for (const auto& seg : d.boundary_quad[static_cast<size_t>(t)].segments) {
        const double chord = (seg[1] - seg[0]).norm();
        const Vec2 dir = (seg[1] - seg[0]).perp();
        const int m = 4000;
        for (int k = 0; k <= m; ++k) {
          const Vec2 p =
              d.geom.project_to_boundary(seg[0] + (seg[1] - seg[0]) * (double(k) / m), dir, h);
          const double w = chord / m * ((k == 0 || k == m) ? 0.5 : 1.0);
          const Vec2 val = d.bases[static_cast<size_t>(t)].fn[static_cast<size_t>(i)].value(
              locate_sub_triangle(part, p, 1e-9), p);
          oracle += w * (c == 0 ? val.x : val.y);
        }
      }
      const double entry = C.coeff(g[static_cast<size_t>(i)], d.dofs.multiplier_dof(t, c));
      CHECK(std::abs(entry - oracle) <= 1e-10);
    }
  }
}

TEST_CASE("multiplier stabilization: jumps, arithmetic, PSD") {
  const Discretization d = disk_discretization(16);
  const SparseMat J = assemble_multiplier_stabilization(d.context());

  // Equal multiplier values jump to zero.
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(d.dofs.total);
  for (int t : d.active.cut_elements) {
    lam[d.dofs.multiplier_dof(t, 0)] = 3.0;
    lam[d.dofs.multiplier_dof(t, 1)] = -2.0;
  }
  CHECK(std::abs(lam.dot(J * lam)) <= 1e-12);

  // Single jump across one face: h_F times the face length.
  REQUIRE(!d.active.interior_faces_cut.empty());
  const int f = d.active.interior_faces_cut.front();
  const Face& fc = d.mesh.faces[static_cast<size_t>(f)];
  Eigen::VectorXd single = Eigen::VectorXd::Zero(d.dofs.total);
  single[d.dofs.multiplier_dof(fc.tri0, 0)] = 1.0;
  const double h_F =
      0.5 * (d.mesh.h_T[static_cast<size_t>(fc.tri0)] + d.mesh.h_T[static_cast<size_t>(fc.tri1)]);
  double expected = 0.0;
  // The chosen element may touch several stabilized faces; sum them.
  for (int ff : d.active.interior_faces_cut) {
    const Face& fc2 = d.mesh.faces[static_cast<size_t>(ff)];
    if (fc2.tri0 == fc.tri0 || fc2.tri1 == fc.tri0) {
      const double hf2 = 0.5 * (d.mesh.h_T[static_cast<size_t>(fc2.tri0)] +
                                d.mesh.h_T[static_cast<size_t>(fc2.tri1)]);
      expected += hf2 * d.mesh.face_length(ff);
    }
  }
  CHECK(single.dot(J * single) == doctest::Approx(expected).epsilon(1e-13));
  CHECK(h_F * d.mesh.face_length(f) <= expected);

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(d.dofs.total);
    for (int i = d.dofs.multiplier_offset; i < d.dofs.total; ++i) x[i] = coef(rng);
    CHECK(x.dot(J * x) >= 0.0);
  }
  CHECK(symmetry_defect(J) == 0.0);
}

TEST_CASE("curl stabilization: gradient fields, rigid rotation, PSD") {
  const Discretization d = disk_discretization(16);
  const SparseMat K = assemble_curl_stabilization(d.context());

  // Gradient field (x, y): curl free, linear, so the nodal interpolant with
  // zero bubbles reproduces it.
  const VectorField grad_field{[](const Vec2& p) { return p; }, nullptr, nullptr};
  const Eigen::VectorXd ug = pad_velocity(
      d.dofs,
      interpolate_velocity_no_bubbles(d.mesh, d.active, d.partitions, d.dofs, grad_field));
  CHECK(std::abs(ug.dot(K * ug)) <= 1e-12);

  // Rigid rotation (-y, x): curl = 2 on the whole element.
  const VectorField rotation{[](const Vec2& p) { return Vec2{-p.y, p.x}; }, nullptr, nullptr};
  const Eigen::VectorXd ur = pad_velocity(
      d.dofs, interpolate_velocity_no_bubbles(d.mesh, d.active, d.partitions, d.dofs, rotation));
  double expected = 0.0;
  for (int t : d.active.cut_elements) {
    const double h = d.mesh.h_T[static_cast<size_t>(t)];
    expected += h * h * 4.0 * d.mesh.area(t);
  }
  CHECK(ur.dot(K * ur) == doctest::Approx(expected).epsilon(1e-12));

  std::mt19937 rng(9);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(d.dofs.total);
    for (int i = 0; i < d.dofs.n_velocity(); ++i) x[i] = coef(rng);
    CHECK(x.dot(K * x) >= 0.0);
  }
}

TEST_CASE("coriolis block: zero at rest, skew, constants") {
  const Discretization d = disk_discretization(16);
  CHECK(assemble_coriolis(d.context(), 0.0).nonZeros() == 0);

  const double omega = 7.5;
  const SparseMat K = assemble_coriolis(d.context(), omega);
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  double scale = 0.0;
  for (int k = 0; k < K.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it)
      scale = std::max(scale, std::abs(it.value()));
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(d.dofs.total);
    for (int i = 0; i < d.dofs.n_velocity(); ++i) x[i] = coef(rng);
    CHECK(std::abs(x.dot(K * x)) <= 1e-10 * scale * x.squaredNorm());
  }

  const Eigen::VectorXd ux = pad_velocity(
      d.dofs, interpolate_velocity(d.mesh, d.active, d.partitions, d.bases, d.dofs,
                                   VectorField::constant({1.0, 0.0})));
  const Eigen::VectorXd uy = pad_velocity(
      d.dofs, interpolate_velocity(d.mesh, d.active, d.partitions, d.bases, d.dofs,
                                   VectorField::constant({0.0, 1.0})));
  CHECK(uy.dot(K * ux) == doctest::Approx(2.0 * omega * kPi / 4.0).epsilon(5e-3));
}

TEST_CASE("right-hand side: zero data, volume force pairing") {
  const Discretization d = disk_discretization(16);
  const AssemblyContext ctx = d.context();
  CHECK(assemble_rhs(ctx, VectorField::zero(), VectorField::zero()).norm() == 0.0);

  const Eigen::VectorXd rhs = assemble_rhs(ctx, VectorField::constant({1.0, 0.0}),
                                           VectorField::zero());
  const Eigen::VectorXd u = pad_velocity(
      d.dofs, interpolate_velocity(d.mesh, d.active, d.partitions, d.bases, d.dofs,
                                   VectorField::constant({1.0, 0.0})));
  CHECK(u.dot(rhs) == doctest::Approx(kPi / 4.0).epsilon(5e-3));
}

TEST_CASE("lagrange system: defaults, structure, solve, boundary identity") {
  const Discretization d = disk_discretization(16);
  const AssemblyContext ctx = d.context();
  const SystemParameters params;  // gamma = 1, curl weight 1
  CHECK(params.gamma == 1.0);
  const ExactStokesSolution exact = boundary_driven_solution();
  const SaddleSystem sys = build_lagrange_system(ctx, params, VectorField::zero(), exact.velocity);

  CHECK(sys.matrix.rows() == d.dofs.total);
  CHECK(structurally_symmetric(sys.matrix));

  double residual = 0.0;
  const Eigen::VectorXd x = solve_direct(sys, &residual);
  CHECK(residual < 1e-9);
  const FieldCoefficients sol = split_solution(sys, x);

  // Weak boundary statement: for every piecewise-constant test vector,
  // integral of (u_h - u_gamma) . mu over the element's boundary piece
  // equals gamma j(lambda_h, mu). Recomputed from scratch.
  const SparseMat J = assemble_multiplier_stabilization(ctx);
  Eigen::VectorXd lam_full = Eigen::VectorXd::Zero(d.dofs.total);
  lam_full.segment(d.dofs.multiplier_offset, d.dofs.n_multiplier()) = sol.multiplier;
  const Eigen::VectorXd j_lam = J * lam_full;
  for (int t : d.active.cut_elements) {
    const BoundaryQuadrature& q = d.boundary_quad[static_cast<size_t>(t)];
    Vec2 mismatch{0, 0};
    for (size_t i = 0; i < q.points.size(); ++i) {
      const VelocitySample s =
          eval_velocity(d.mesh, d.dofs, d.partitions, d.bases, sol.velocity, t, q.points[i]);
      mismatch += (s.value - exact.velocity.value(q.points[i])) * q.weights[i];
    }
    for (int c = 0; c < 2; ++c) {
      const double lhs = c == 0 ? mismatch.x : mismatch.y;
      const double rhs_c = params.gamma * j_lam[d.dofs.multiplier_dof(t, c)];
      CHECK(std::abs(lhs - rhs_c) <= 1e-9 * std::max(1.0, sol.velocity.norm()));
    }
  }
}

TEST_CASE("nitsche system: ghost penalty of affine fields, scalar stabilization, solve") {
  const Discretization d = disk_discretization(16, Formulation::nitsche);
  const AssemblyContext ctx = d.context();

  const SparseMat G = assemble_gradient_jump_penalty(ctx);
  const VectorField affine{
      [](const Vec2& p) { return Vec2{1.0 + 2.0 * p.x - p.y, 0.5 * p.x + 3.0 * p.y}; }, nullptr,
      nullptr};
  const Eigen::VectorXd u = pad_velocity(
      d.dofs, interpolate_velocity_no_bubbles(d.mesh, d.active, d.partitions, d.dofs, affine));
  CHECK(std::abs(u.dot(G * u)) <= 1e-12);
  CHECK(symmetry_defect(G) <= 1e-13);

  const SparseMat J = assemble_scalar_multiplier_stabilization(ctx);
  Eigen::VectorXd rho = Eigen::VectorXd::Zero(d.dofs.total);
  for (int t : d.active.cut_elements) rho[d.dofs.multiplier_dof(t, 0)] = 4.0;
  CHECK(std::abs(rho.dot(J * rho)) <= 1e-13);

  const ExactStokesSolution exact = boundary_driven_solution();
  const SaddleSystem sys =
      build_nitsche_system(ctx, SystemParameters{}, VectorField::zero(), exact.velocity);
  CHECK(structurally_symmetric(sys.matrix));
  double residual = 0.0;
  const Eigen::VectorXd x = solve_direct(sys, &residual);
  CHECK(residual < 1e-9);
  // The boundary condition is enforced approximately.
  const FieldCoefficients sol = split_solution(sys, x);
  double err = 0.0, len = 0.0;
  for (int t : d.active.cut_elements) {
    const BoundaryQuadrature& q = d.boundary_quad[static_cast<size_t>(t)];
    for (size_t i = 0; i < q.points.size(); ++i) {
      const VelocitySample s =
          eval_velocity(d.mesh, d.dofs, d.partitions, d.bases, sol.velocity, t, q.points[i]);
      err += q.weights[i] * (s.value - exact.velocity.value(q.points[i])).squared_norm();
      len += q.weights[i];
    }
  }
  CHECK(std::sqrt(err / len) < 0.1);
}
