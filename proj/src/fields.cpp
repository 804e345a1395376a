#include "cutstokes/fields.hpp"

namespace cutstokes {

ExactStokesSolution boundary_driven_solution() {
  ExactStokesSolution sol;
  sol.velocity.value = [](const Vec2& p) {
    return Vec2{20.0 * p.x * p.y * p.y * p.y, 5.0 * p.x * p.x * p.x * p.x - 5.0 * p.y * p.y * p.y * p.y};
  };
  sol.velocity.jacobian = [](const Vec2& p) {
    Mat2 J;
    J(0, 0) = 20.0 * p.y * p.y * p.y;
    J(0, 1) = 60.0 * p.x * p.y * p.y;
    J(1, 0) = 20.0 * p.x * p.x * p.x;
    J(1, 1) = -20.0 * p.y * p.y * p.y;
    return J;
  };
  sol.velocity.divergence = [](const Vec2&) { return 0.0; };
  sol.pressure.value = [](const Vec2& p) {
    return 60.0 * p.x * p.x * p.y - 20.0 * p.y * p.y * p.y;
  };
  sol.pressure.gradient = [](const Vec2& p) {
    return Vec2{120.0 * p.x * p.y, 60.0 * p.x * p.x - 60.0 * p.y * p.y};
  };
  return sol;
}

}  // namespace cutstokes
