#include "cutstokes/geometry.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace cutstokes {

namespace {

constexpr double kVertexSnapRel = 1e-12;   // |phi| below this times h snaps to the barycenter sign
constexpr double kSliverFraction = 1e-10;  // cut fractions closer to 0/1 than this are reclassified

int strict_sign(double v) { return v > 0.0 ? 1 : -1; }

/// Root of phi on the segment [a, b]. Falls back to the endpoint closest to
/// the zero level when the endpoint values do not actually bracket a root
/// (possible after sign snapping of near-zero vertex values).
Vec2 edge_root(const LevelSetGeometry& geom, Vec2 a, Vec2 b, double tol) {
  double fa = geom.phi(a);
  double fb = geom.phi(b);
  if (std::abs(fa) <= tol) return a;
  if (std::abs(fb) <= tol) return b;
  if (fa * fb > 0.0) return std::abs(fa) < std::abs(fb) ? a : b;
  for (int it = 0; it < 200; ++it) {
    const Vec2 m = (a + b) * 0.5;
    const double fm = geom.phi(m);
    if (std::abs(fm) <= tol) return m;
    if (fa * fm < 0.0) {
      b = m;
      fb = fm;
    } else {
      a = m;
      fa = fm;
    }
  }
  return (a + b) * 0.5;
}

double polygon_area(const std::vector<Vec2>& poly) {
  double s = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    s += p.cross(q);
  }
  return 0.5 * s;
}

/// Part of triangle (p0, p1, p2) where phi <= 0, as a polygon. `inside[k]`
/// decides which side each corner belongs to; roots are found on edges whose
/// endpoints disagree.
std::vector<Vec2> clip_triangle_inside(const LevelSetGeometry& geom,
                                       const std::array<Vec2, 3>& corners,
                                       const std::array<bool, 3>& inside, double root_tol) {
  std::vector<Vec2> poly;
  poly.reserve(4);
  for (int k = 0; k < 3; ++k) {
    const Vec2& a = corners[static_cast<size_t>(k)];
    const Vec2& b = corners[static_cast<size_t>((k + 1) % 3)];
    if (inside[static_cast<size_t>(k)]) poly.push_back(a);
    if (inside[static_cast<size_t>(k)] != inside[static_cast<size_t>((k + 1) % 3)])
      poly.push_back(edge_root(geom, a, b, root_tol));
  }
  return poly;
}

}  // namespace

LevelSetGeometry LevelSetGeometry::disk(const Vec2& center, double radius) {
  LevelSetGeometry g;
  g.kind_ = Kind::analytic_disk;
  g.center_ = center;
  g.radius_ = radius;
  g.phi_ = [center, radius](const Vec2& p) { return (p - center).norm() - radius; };
  g.gradient_ = [center](const Vec2& p) { return (p - center).normalized(); };
  return g;
}

LevelSetGeometry LevelSetGeometry::from_callable(std::function<double(const Vec2&)> phi,
                                                 std::function<Vec2(const Vec2&)> gradient) {
  LevelSetGeometry g;
  g.kind_ = Kind::generic_callable;
  g.phi_ = std::move(phi);
  g.gradient_ = std::move(gradient);
  return g;
}

Vec2 LevelSetGeometry::gradient(const Vec2& p) const {
  if (gradient_) return gradient_(p);
  const double eps = 1e-6;
  const double dx = phi_({p.x + eps, p.y}) - phi_({p.x - eps, p.y});
  const double dy = phi_({p.x, p.y + eps}) - phi_({p.x, p.y - eps});
  return {dx / (2.0 * eps), dy / (2.0 * eps)};
}

Vec2 LevelSetGeometry::project_to_boundary(const Vec2& p, const Vec2& dir,
                                           double length_scale) const {
  if (kind_ == Kind::analytic_disk) {
    const Vec2 d = p - center_;
    const double n = d.norm();
    if (n < 1e-14) return center_ + Vec2{radius_, 0.0};
    return center_ + d * (radius_ / n);
  }
  const double f0 = phi_(p);
  const double tol = 1e-14 * std::max(length_scale, 1e-30);
  if (std::abs(f0) <= tol) return p;
  const Vec2 u = dir.norm() > 1e-14 ? dir.normalized() : gradient(p).normalized();
  // Expand a bracket around p along u, trying both sides deterministically.
  for (int k = 6; k >= 0; --k) {
    const double step = length_scale / static_cast<double>(1 << k);
    for (double s : {step, -step}) {
      if (phi_(p + u * s) * f0 < 0.0) {
        Vec2 a = p;
        Vec2 b = p + u * s;
        double fa = f0;
        for (int it = 0; it < 200; ++it) {
          const Vec2 m = (a + b) * 0.5;
          const double fm = phi_(m);
          if (std::abs(fm) <= tol) return m;
          if (fa * fm < 0.0) {
            b = m;
          } else {
            a = m;
            fa = fm;
          }
        }
        return (a + b) * 0.5;
      }
    }
  }
  return p;  // no zero within reach; keep the chord point
}

std::vector<ElementClassification> classify_elements(const BackgroundMesh& mesh,
                                                     const LevelSetGeometry& geom) {
  std::vector<ElementClassification> out(static_cast<size_t>(mesh.num_triangles()));
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    ElementClassification& c = out[static_cast<size_t>(t)];
    c.element_id = t;
    const auto& tv = mesh.tri(t);
    const double h = mesh.h_T[static_cast<size_t>(t)];
    const double snap = kVertexSnapRel * h;
    const int bary_sign = strict_sign(geom.phi(mesh.barycenter(t)));
    std::array<double, 3> val;
    for (int k = 0; k < 3; ++k) {
      val[static_cast<size_t>(k)] = geom.phi(mesh.vertex(tv[k]));
      c.vertex_signs[static_cast<size_t>(k)] =
          std::abs(val[static_cast<size_t>(k)]) < snap ? bary_sign
                                                       : strict_sign(val[static_cast<size_t>(k)]);
    }
    const int negatives = static_cast<int>(c.vertex_signs[0] < 0) +
                          static_cast<int>(c.vertex_signs[1] < 0) +
                          static_cast<int>(c.vertex_signs[2] < 0);
    if (negatives == 3) {
      c.label = ElementLabel::interior;
      c.inside_area_fraction = 1.0;
      continue;
    }
    if (negatives == 0) {
      c.label = ElementLabel::exterior;
      c.inside_area_fraction = 0.0;
      continue;
    }

    c.label = ElementLabel::cut;
    int nroots = 0;
    std::array<Vec2, 3> corners{mesh.vertex(tv[0]), mesh.vertex(tv[1]), mesh.vertex(tv[2])};
    std::array<bool, 3> inside{c.vertex_signs[0] < 0, c.vertex_signs[1] < 0, c.vertex_signs[2] < 0};
    for (int k = 0; k < 3; ++k) {
      if (inside[static_cast<size_t>(k)] == inside[static_cast<size_t>((k + 1) % 3)]) continue;
      const Vec2 root = edge_root(geom, corners[static_cast<size_t>(k)],
                                  corners[static_cast<size_t>((k + 1) % 3)], snap);
      if (nroots < 2) {
        c.cut_edge_local[static_cast<size_t>(nroots)] = k;
        c.edge_roots[static_cast<size_t>(nroots)] = root;
      }
      ++nroots;
    }
    assert(nroots == 2);
    const std::vector<Vec2> poly = clip_triangle_inside(geom, corners, inside, snap);
    const double frac = poly.size() >= 3 ? polygon_area(poly) / mesh.area(t) : 0.0;
    c.inside_area_fraction = frac;
    if (frac < kSliverFraction || frac > 1.0 - kSliverFraction) {
      // Sliver cut: classify by where the bulk of the element sits.
      c.label = bary_sign < 0 ? ElementLabel::interior : ElementLabel::exterior;
      c.inside_area_fraction = bary_sign < 0 ? 1.0 : 0.0;
      c.cut_edge_local = {-1, -1};
    }
  }
  return out;
}

TriangleRule triangle_rule(int degree) {
  TriangleRule r;
  if (degree <= 2) {
    r.barycentric = {{{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0}},
                     {{1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}},
                     {{1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}}};
    r.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    return r;
  }
  if (degree <= 4) {
    const double a1 = 0.108103018168070, b1 = 0.445948490915965, w1 = 0.223381589678011;
    const double a2 = 0.816847572980459, b2 = 0.091576213509771, w2 = 0.109951743655322;
    r.barycentric = {{{a1, b1, b1}}, {{b1, a1, b1}}, {{b1, b1, a1}},
                     {{a2, b2, b2}}, {{b2, a2, b2}}, {{b2, b2, a2}}};
    r.weights = {w1, w1, w1, w2, w2, w2};
    return r;
  }
  if (degree <= 5) {
    const double a1 = 0.059715871789770, b1 = 0.470142064105115, w1 = 0.132394152788506;
    const double a2 = 0.797426985353087, b2 = 0.101286507323456, w2 = 0.125939180544827;
    r.barycentric = {{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}},
                     {{a1, b1, b1}}, {{b1, a1, b1}}, {{b1, b1, a1}},
                     {{a2, b2, b2}}, {{b2, a2, b2}}, {{b2, b2, a2}}};
    r.weights = {0.225, w1, w1, w1, w2, w2, w2};
    return r;
  }
  throw std::invalid_argument("triangle_rule: unsupported degree " + std::to_string(degree));
}

SegmentRule segment_rule(int degree) {
  const int n = std::clamp((degree + 2) / 2, 1, 6);
  if (degree > 11) throw std::invalid_argument("segment_rule: unsupported degree");
  // Gauss-Legendre on [-1, 1].
  std::vector<double> x, w;
  switch (n) {
    case 1:
      x = {0.0};
      w = {2.0};
      break;
    case 2:
      x = {-0.5773502691896257, 0.5773502691896257};
      w = {1.0, 1.0};
      break;
    case 3:
      x = {-0.7745966692414834, 0.0, 0.7745966692414834};
      w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
      break;
    case 4:
      x = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
      w = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};
      break;
    case 5:
      x = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
      w = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
           0.2369268850561891};
      break;
    default:
      x = {-0.9324695142031521, -0.6612093864662645, -0.2386191860831969, 0.2386191860831969,
           0.6612093864662645, 0.9324695142031521};
      w = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910, 0.3607615730481386,
           0.1713244923791704};
      break;
  }
  SegmentRule r;
  for (size_t i = 0; i < x.size(); ++i) {
    r.nodes.push_back(0.5 * (1.0 + x[i]));
    r.weights.push_back(0.5 * w[i]);
  }
  return r;
}

std::vector<CutCellQuadrature> build_cut_quadrature(
    const BackgroundMesh& mesh, const LevelSetGeometry& geom,
    const std::vector<ElementClassification>& classification,
    const std::vector<MacroPartition>& partitions, int order) {
  if (order < 2) throw std::invalid_argument("build_cut_quadrature: order must be >= 2");
  const TriangleRule rule = triangle_rule(order);
  std::vector<CutCellQuadrature> out(static_cast<size_t>(mesh.num_triangles()));

  auto add_fragment = [&rule](CutCellQuadrature& q, const Vec2& p0, const Vec2& p1, const Vec2& p2,
                              int sub) {
    const double area = signed_area(p0, p1, p2);
    for (size_t i = 0; i < rule.weights.size(); ++i) {
      const auto& l = rule.barycentric[i];
      q.points.push_back(p0 * l[0] + p1 * l[1] + p2 * l[2]);
      q.weights.push_back(rule.weights[i] * area);
      q.sub_tri.push_back(sub);
    }
  };

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementClassification& c = classification[static_cast<size_t>(t)];
    if (c.label == ElementLabel::exterior) continue;
    CutCellQuadrature& q = out[static_cast<size_t>(t)];
    q.element_id = t;
    const MacroPartition& part = partitions[static_cast<size_t>(t)];
    const double tri_area = mesh.area(t);
    const double root_tol = kVertexSnapRel * mesh.h_T[static_cast<size_t>(t)];

    if (c.label == ElementLabel::interior) {
      for (int s = 0; s < 6; ++s) {
        const auto& st = part.sub_triangles[static_cast<size_t>(s)];
        add_fragment(q, st[0], st[1], st[2], s);
      }
      q.sub_polygon_count = 6;
      continue;
    }

    for (int s = 0; s < 6; ++s) {
      const auto& st = part.sub_triangles[static_cast<size_t>(s)];
      std::array<bool, 3> inside;
      bool all_in = true, all_out = true;
      for (int k = 0; k < 3; ++k) {
        inside[static_cast<size_t>(k)] = geom.phi(st[static_cast<size_t>(k)]) <= 0.0;
        all_in = all_in && inside[static_cast<size_t>(k)];
        all_out = all_out && !inside[static_cast<size_t>(k)];
      }
      if (all_out) continue;
      if (all_in) {
        add_fragment(q, st[0], st[1], st[2], s);
        ++q.sub_polygon_count;
        continue;
      }
      const std::vector<Vec2> poly = clip_triangle_inside(geom, st, inside, root_tol);
      if (poly.size() < 3) continue;
      int fragments = 0;
      for (size_t i = 1; i + 1 < poly.size(); ++i) {
        if (signed_area(poly[0], poly[i], poly[i + 1]) <= 1e-14 * tri_area) continue;
        add_fragment(q, poly[0], poly[i], poly[i + 1], s);
        ++fragments;
      }
      q.sub_polygon_count += fragments;
    }
    if (q.points.empty())
      throw std::runtime_error("build_cut_quadrature: cut element " + std::to_string(t) +
                               " has empty intersection (classification inconsistency)");
  }
  return out;
}

namespace {

/// Interior-dip detection on an edge whose endpoints are on the same side:
/// reports true when the zero level crosses the open edge segment.
bool edge_has_dip(const LevelSetGeometry& geom, const Vec2& a, const Vec2& b, double tol) {
  if (geom.kind() == LevelSetGeometry::Kind::analytic_disk) {
    const Vec2 d = b - a;
    const double tproj = std::clamp((geom.center() - a).dot(d) / d.squared_norm(), 0.0, 1.0);
    const double dist = (a + d * tproj - geom.center()).norm();
    const double fa = geom.phi(a);
    const double fb = geom.phi(b);
    return fa > tol && fb > tol && dist < geom.radius() - tol;
  }
  const double fa = geom.phi(a);
  const double fb = geom.phi(b);
  double lo = std::min(fa, fb), hi = std::max(fa, fb);
  for (int i = 1; i < 32; ++i) {
    const double v = geom.phi(a + (b - a) * (i / 32.0));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return (fa > tol && fb > tol && lo < -tol) || (fa < -tol && fb < -tol && hi > tol);
}

}  // namespace

std::vector<BoundaryQuadrature> build_boundary_quadrature(
    const BackgroundMesh& mesh, const LevelSetGeometry& geom,
    const std::vector<ElementClassification>& classification,
    const std::vector<MacroPartition>& partitions, int order, int n_sub) {
  if (order < 2) throw std::invalid_argument("build_boundary_quadrature: order must be >= 2");
  if (n_sub < 1) throw std::invalid_argument("build_boundary_quadrature: n_sub must be >= 1");
  const SegmentRule rule = segment_rule(order);
  std::vector<BoundaryQuadrature> out(static_cast<size_t>(mesh.num_triangles()));

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementClassification& c = classification[static_cast<size_t>(t)];
    if (c.label != ElementLabel::cut) continue;
    const double h = mesh.h_T[static_cast<size_t>(t)];
    const auto& tv = mesh.tri(t);

    // Exactly one boundary segment must cross the element; tangential dips on
    // same-side edges mean the mesh does not resolve the geometry.
    int roots = 0;
    for (int k = 0; k < 3; ++k) {
      const bool ia = c.vertex_signs[static_cast<size_t>(k)] < 0;
      const bool ib = c.vertex_signs[static_cast<size_t>((k + 1) % 3)] < 0;
      if (ia != ib) {
        ++roots;
      } else if (edge_has_dip(geom, mesh.vertex(tv[k]), mesh.vertex(tv[(k + 1) % 3]),
                              kVertexSnapRel * h)) {
        roots += 2;
      }
    }
    if (roots != 2)
      throw std::runtime_error("build_boundary_quadrature: element " + std::to_string(t) + " has " +
                               std::to_string(roots) +
                               " boundary crossings; mesh too coarse for the geometry");

    BoundaryQuadrature& q = out[static_cast<size_t>(t)];
    q.element_id = t;
    const MacroPartition& part = partitions[static_cast<size_t>(t)];
    const Vec2 r0 = c.edge_roots[0];
    const Vec2 r1 = c.edge_roots[1];
    const Vec2 chord = r1 - r0;
    const Vec2 chord_normal = chord.perp();

    auto on_boundary = [&](double s) {
      return geom.project_to_boundary(r0 + chord * s, chord_normal, h);
    };

    // Split parameters: uniform refinement plus the crossings of the projected
    // curve with the partition edges, so every piece stays inside one
    // sub-triangle.
    std::vector<double> params;
    for (int i = 0; i <= n_sub; ++i) params.push_back(static_cast<double>(i) / n_sub);
    std::array<std::array<Vec2, 2>, 6> internal_edges;
    for (int k = 0; k < 3; ++k) {
      internal_edges[static_cast<size_t>(k)] = {mesh.vertex(tv[k]), part.x_T};
      internal_edges[static_cast<size_t>(3 + k)] = {part.x_F[static_cast<size_t>(k)], part.x_T};
    }
    constexpr int kScan = 64;
    std::array<Vec2, kScan + 1> samples;
    for (int i = 0; i <= kScan; ++i) samples[static_cast<size_t>(i)] = on_boundary(i / double(kScan));
    for (const auto& e : internal_edges) {
      const Vec2 ed = e[1] - e[0];
      auto side = [&](const Vec2& p) { return ed.cross(p - e[0]); };
      for (int i = 0; i < kScan; ++i) {
        double sa = side(samples[static_cast<size_t>(i)]);
        double sb = side(samples[static_cast<size_t>(i + 1)]);
        if (sa == 0.0 || sa * sb >= 0.0) continue;
        double ta = i / double(kScan), tb = (i + 1) / double(kScan);
        for (int it = 0; it < 60; ++it) {
          const double tm = 0.5 * (ta + tb);
          const double sm = side(on_boundary(tm));
          if (sa * sm <= 0.0) {
            tb = tm;
          } else {
            ta = tm;
            sa = sm;
          }
        }
        const double tc = 0.5 * (ta + tb);
        const Vec2 p = on_boundary(tc);
        const double along = (p - e[0]).dot(ed) / ed.squared_norm();
        if (along > -1e-9 && along < 1.0 + 1e-9) params.push_back(tc);
      }
    }
    std::sort(params.begin(), params.end());
    params.erase(std::unique(params.begin(), params.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-9; }),
                 params.end());

    for (size_t i = 0; i + 1 < params.size(); ++i) {
      const Vec2 qa = on_boundary(params[i]);
      const Vec2 qb = on_boundary(params[i + 1]);
      const double len = (qb - qa).norm();
      if (len < 1e-14 * h) continue;
      q.segments.push_back({qa, qb});
      for (size_t g = 0; g < rule.nodes.size(); ++g) {
        const Vec2 p = geom.project_to_boundary(qa + (qb - qa) * rule.nodes[g], chord_normal, h);
        q.points.push_back(p);
        q.weights.push_back(len * rule.weights[g]);
        q.normals.push_back(geom.normal(p));
        q.sub_tri.push_back(locate_sub_triangle(part, p, 1e-9));
      }
    }
    if (q.points.empty())
      throw std::runtime_error("build_boundary_quadrature: empty boundary rule on cut element " +
                               std::to_string(t));
  }
  return out;
}

}  // namespace cutstokes
