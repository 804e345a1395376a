#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cutstokes/discretization.hpp"
#include "cutstokes/fields.hpp"
#include "cutstokes/interpolation.hpp"
#include "cutstokes/solve.hpp"

using namespace cutstokes;

namespace {

Discretization disk_discretization(int n, Formulation form = Formulation::lagrange) {
  return build_discretization(n, Box{{-1, -1}, {1, 1}}, LevelSetGeometry::disk({0, 0}, 0.5), form);
}

SaddleSystem toy_system() {
  SaddleSystem sys;
  sys.matrix.resize(2, 2);
  std::vector<Eigen::Triplet<double>> t{{0, 0, 4.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 3.0}};
  sys.matrix.setFromTriplets(t.begin(), t.end());
  sys.rhs.resize(2);
  sys.rhs << 1.0, 2.0;
  sys.blocks = BlockRanges{0, 2, 2, 2, 2, 2};
  return sys;
}

}  // namespace

TEST_CASE("direct solver on a 2x2 block") {
  const SaddleSystem sys = toy_system();
  const Eigen::VectorXd x = solve_direct(sys);
  // Hand inverse of [[4,1],[1,3]] applied to (1,2).
  CHECK(x[0] == doctest::Approx(1.0 / 11.0).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(7.0 / 11.0).epsilon(1e-14));
}

TEST_CASE("zeroed multiplier row is detected as singular") {
  const Discretization d = disk_discretization(8);
  const ExactStokesSolution exact = boundary_driven_solution();
  SaddleSystem sys =
      build_lagrange_system(d.context(), SystemParameters{}, VectorField::zero(), exact.velocity);
  const int row = d.dofs.multiplier_dof(d.active.cut_elements.front(), 0);
  for (int k = 0; k < sys.matrix.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.matrix, k); it; ++it) {
      if (it.row() == row) it.valueRef() = 0.0;
    }
  }
  sys.rhs[row] = 0.0;
  CHECK_THROWS_AS(solve_direct(sys), std::runtime_error);
}

TEST_CASE("pressure extension: constants, arithmetic, mapping distance") {
  const Discretization d = disk_discretization(16);

  // Globally constant pressure extends to exactly zero.
  Eigen::VectorXd constant = Eigen::VectorXd::Constant(d.dofs.n_pressure(), 4.25);
  const Eigen::VectorXd zero = extend_pressure(constant, d.mesh, d.active, d.dofs);
  CHECK(zero.lpNorm<Eigen::Infinity>() <= 1e-12);

  // A cut element copies the value of its nearest interior element.
  const std::vector<int> map = nearest_interior_map(d.mesh, d.active);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(d.dofs.n_pressure());
  const int t_cut = d.active.cut_elements.front();
  const int t_src = map[static_cast<size_t>(t_cut)];
  REQUIRE(d.active.is_active(t_src));
  p[d.dofs.pressure_dof(t_src) - d.dofs.pressure_offset] = 5.0;
  const Eigen::VectorXd ext = extend_pressure(p, d.mesh, d.active, d.dofs);
  double mean = 0.0, area = 0.0;
  for (int t : d.active.active_elements) {
    mean += d.mesh.area(t) * p[d.dofs.pressure_dof(t) - d.dofs.pressure_offset];
    area += d.mesh.area(t);
  }
  mean /= area;
  CHECK(ext[d.dofs.pressure_dof(t_cut) - d.dofs.pressure_offset] ==
        doctest::Approx(5.0 - mean).epsilon(1e-13));

  // Every mapped interior element is nearby (within a few h).
  for (int t : d.active.cut_elements) {
    const int s = map[static_cast<size_t>(t)];
    const double dist = (d.mesh.barycenter(t) - d.mesh.barycenter(s)).norm();
    CHECK(dist <= 3.0 * d.mesh.h_T[static_cast<size_t>(t)]);
  }
}

TEST_CASE("divergence field: zeros, single bubble, solved system") {
  const Discretization d = disk_discretization(16);
  const AssemblyContext ctx = d.context();

  const DivergenceField zero =
      compute_divergence_field(ctx, Eigen::VectorXd::Zero(d.dofs.n_velocity()));
  CHECK(zero.max_abs == 0.0);

  const int t = d.active.interior_elements.front();
  const int f = d.mesh.triangle_faces[static_cast<size_t>(t)][0];
  Eigen::VectorXd u = Eigen::VectorXd::Zero(d.dofs.n_velocity());
  u[d.dofs.face_dof(f)] = 1.0;
  const DivergenceField single = compute_divergence_field(ctx, u);
  const double alpha = face_bubble_divergence(d.partitions[static_cast<size_t>(t)], 0);
  CHECK(std::abs(single.per_element[static_cast<size_t>(t)]) ==
        doctest::Approx(alpha).epsilon(1e-12));
  const Face& fc = d.mesh.faces[static_cast<size_t>(f)];
  const int other = fc.tri0 == t ? fc.tri1 : fc.tri0;
  for (int tt : d.active.active_elements) {
    if (tt == t || tt == other) continue;
    CHECK(single.per_element[static_cast<size_t>(tt)] == 0.0);
  }

  const ExactStokesSolution exact = boundary_driven_solution();
  const SaddleSystem sys =
      build_lagrange_system(ctx, SystemParameters{}, VectorField::zero(), exact.velocity);
  const FieldCoefficients sol = split_solution(sys, solve_direct(sys));
  const DivergenceField div = compute_divergence_field(ctx, sol.velocity);
  const double u_h1 = velocity_h1_norm_mesh_domain(ctx, sol.velocity);
  CHECK(div.max_abs <= 1e-8 * u_h1);
}

TEST_CASE("error report: exact-coefficient cross-check and zero fields") {
  const Discretization d = disk_discretization(16);
  const AssemblyContext ctx = d.context();
  const ExactStokesSolution exact = boundary_driven_solution();

  // Inject the interpolants: the reported velocity errors must equal the
  // interpolation errors computed independently.
  FieldCoefficients interp;
  interp.velocity =
      interpolate_velocity(d.mesh, d.active, d.partitions, d.bases, d.dofs, exact.velocity);
  interp.pressure = project_pressure(d.mesh, d.active, d.dofs, d.cut_quad, exact.pressure);
  interp.multiplier = Eigen::VectorXd::Zero(d.dofs.n_multiplier());
  const ErrorReport rep = compute_errors(ctx, d.geom, d.classification, exact, interp);

  const auto quad = build_cut_quadrature(d.mesh, d.geom, d.classification, d.partitions, 5);
  double e0 = 0.0;
  for (int t : d.active.active_elements) {
    const auto& q = quad[static_cast<size_t>(t)];
    for (size_t i = 0; i < q.points.size(); ++i) {
      const VelocitySample s =
          eval_velocity(d.mesh, d.dofs, d.partitions, d.bases, interp.velocity, t, q.points[i]);
      e0 += q.weights[i] * (s.value - exact.velocity.value(q.points[i])).squared_norm();
    }
  }
  CHECK(rep.e_u_L2 == doctest::Approx(std::sqrt(e0)).epsilon(1e-12));
  CHECK(rep.h == doctest::Approx(d.active.reported_h).epsilon(1e-15));
  CHECK(rep.e_u_H1 >= rep.e_u_H1_semi);

  // Zero discrete solution against zero exact fields: all errors vanish.
  const ExactStokesSolution zero_exact{VectorField::zero(), ScalarField::constant(0.0)};
  FieldCoefficients zero;
  zero.velocity = Eigen::VectorXd::Zero(d.dofs.n_velocity());
  zero.pressure = Eigen::VectorXd::Zero(d.dofs.n_pressure());
  zero.multiplier = Eigen::VectorXd::Zero(d.dofs.n_multiplier());
  const ErrorReport zrep = compute_errors(ctx, d.geom, d.classification, zero_exact, zero);
  CHECK(zrep.e_u_L2 == 0.0);
  CHECK(zrep.e_u_H1 == 0.0);
  CHECK(zrep.e_p_interior == 0.0);
  CHECK(zrep.e_p_extended == 0.0);
  CHECK(zrep.e_lambda_L2Gamma == 0.0);
  CHECK(zrep.div_max == 0.0);
}
