#pragma once

#include <functional>

#include "cutstokes/vec.hpp"

namespace cutstokes {

/// Analytic vector field with optional derivatives. jacobian(p)(i, j) is
/// d u_i / d x_j.
struct VectorField {
  std::function<Vec2(const Vec2&)> value;
  std::function<Mat2(const Vec2&)> jacobian;
  std::function<double(const Vec2&)> divergence;

  static VectorField constant(const Vec2& c) {
    return {[c](const Vec2&) { return c; }, [](const Vec2&) { return Mat2{}; },
            [](const Vec2&) { return 0.0; }};
  }
  static VectorField zero() { return constant({0.0, 0.0}); }
};

struct ScalarField {
  std::function<double(const Vec2&)> value;
  std::function<Vec2(const Vec2&)> gradient;

  static ScalarField constant(double c) {
    return {[c](const Vec2&) { return c; }, [](const Vec2&) { return Vec2{0.0, 0.0}; }};
  }
};

struct ExactStokesSolution {
  VectorField velocity;
  ScalarField pressure;

  /// Fluid stress on the boundary: -(grad u)^T n + p n, with the Jacobian
  /// convention above this is -J n + p n.
  Vec2 boundary_stress(const Vec2& p, const Vec2& n) const {
    const Mat2 J = velocity.jacobian(p);
    const double pr = pressure.value(p);
    return J.apply(n) * -1.0 + n * pr;
  }
};

/// The boundary-driven test problem on the disk: u = (20 x y^3, 5 x^4 - 5 y^4),
/// p = 60 x^2 y - 20 y^3. Divergence free with zero body force.
ExactStokesSolution boundary_driven_solution();

}  // namespace cutstokes
