#pragma once

#include <functional>
#include <vector>

#include "cutstokes/mesh.hpp"
#include "cutstokes/vec.hpp"

namespace cutstokes {

/// Implicit description of the physical domain: phi < 0 inside, phi = 0 on
/// the boundary, phi > 0 outside.
class LevelSetGeometry {
 public:
  enum class Kind { analytic_disk, generic_callable };

  static LevelSetGeometry disk(const Vec2& center, double radius);
  static LevelSetGeometry from_callable(std::function<double(const Vec2&)> phi,
                                        std::function<Vec2(const Vec2&)> gradient = nullptr);

  double phi(const Vec2& p) const { return phi_(p); }
  /// Analytic gradient when available, central differences otherwise.
  Vec2 gradient(const Vec2& p) const;
  /// Unit outward normal (normalized gradient).
  Vec2 normal(const Vec2& p) const { return gradient(p).normalized(); }

  Kind kind() const { return kind_; }
  Vec2 center() const { return center_; }
  double radius() const { return radius_; }

  /// Map a point near the boundary onto {phi = 0}: closest-point projection
  /// for the analytic disk, root finding along dir (falling back to the
  /// gradient direction) for generic level sets.
  Vec2 project_to_boundary(const Vec2& p, const Vec2& dir, double length_scale) const;

 private:
  std::function<double(const Vec2&)> phi_;
  std::function<Vec2(const Vec2&)> gradient_;
  Kind kind_ = Kind::generic_callable;
  Vec2 center_{0.0, 0.0};
  double radius_ = 0.0;
};

/// Area quadrature on T intersected with the physical domain. For interior
/// elements this is a standard rule on each of the 6 macro sub-triangles; for
/// cut elements each sub-triangle is clipped against {phi <= 0} and the
/// clipped polygon is triangulated.
struct CutCellQuadrature {
  int element_id = -1;
  std::vector<Vec2> points;
  std::vector<double> weights;
  /// Macro sub-triangle containing each point (for basis evaluation).
  std::vector<int> sub_tri;
  int sub_polygon_count = 0;

  double total_weight() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

/// Line quadrature on the piece of the boundary inside one cut element.
/// Points lie on {phi = 0}; weights are lengths of the inscribed chords;
/// normals are the discrete outward normals at the points.
struct BoundaryQuadrature {
  int element_id = -1;
  std::vector<Vec2> points;
  std::vector<double> weights;
  std::vector<Vec2> normals;
  std::vector<int> sub_tri;
  /// Projected chord endpoints backing the weights, one pair per piece.
  std::vector<std::array<Vec2, 2>> segments;

  double total_weight() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

/// Label every background element against the domain. Vertex values with
/// |phi| < 1e-12 h are snapped to the sign at the element barycenter, and
/// sliver cuts (area fraction within 1e-10 of 0 or 1) are reclassified by the
/// barycenter sign, so classification is deterministic for degenerate
/// intersections.
std::vector<ElementClassification> classify_elements(const BackgroundMesh& mesh,
                                                     const LevelSetGeometry& geom);

/// Quadrature over T cap Omega for every active element, exact to the given
/// polynomial degree on each (possibly clipped) sub-triangle fragment.
/// Returned in element-index order, indexed by background element id.
std::vector<CutCellQuadrature> build_cut_quadrature(
    const BackgroundMesh& mesh, const LevelSetGeometry& geom,
    const std::vector<ElementClassification>& classification,
    const std::vector<MacroPartition>& partitions, int order);

/// Boundary quadrature for every cut element. The chord between the two edge
/// roots is split at its crossings with the macro partition edges, subdivided
/// into n_sub pieces, and Gauss points on each piece are projected onto the
/// boundary with chord-length weights.
std::vector<BoundaryQuadrature> build_boundary_quadrature(
    const BackgroundMesh& mesh, const LevelSetGeometry& geom,
    const std::vector<ElementClassification>& classification,
    const std::vector<MacroPartition>& partitions, int order, int n_sub = 4);

/// Reference rule on the unit triangle, exact for polynomials of the given
/// degree; weights sum to 1.
struct TriangleRule {
  std::vector<std::array<double, 3>> barycentric;
  std::vector<double> weights;
};
TriangleRule triangle_rule(int degree);

/// Gauss-Legendre nodes/weights on [0, 1] exact for the given degree.
struct SegmentRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
SegmentRule segment_rule(int degree);

}  // namespace cutstokes
