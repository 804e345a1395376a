#pragma once

#include <array>
#include <string>
#include <vector>

#include "cutstokes/vec.hpp"

namespace cutstokes {

struct Box {
  Vec2 lo{-1.0, -1.0};
  Vec2 hi{1.0, 1.0};
  double area() const { return (hi.x - lo.x) * (hi.y - lo.y); }
};

/// Unique edge of the background mesh. Adjacent triangles are stored with
/// tri0 < tri1; tri1 = -1 on the boundary of the box. The face normal points
/// from tri0 to tri1 (outward from tri0 on boundary faces).
struct Face {
  std::array<int, 2> vertices{-1, -1};
  int tri0 = -1;
  int tri1 = -1;
  bool is_mesh_boundary() const { return tri1 < 0; }
};

/// Conforming triangulation of the box S. All triangles are counterclockwise.
struct BackgroundMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Face> faces;
  /// For each triangle, the face id of edge k = (v_k, v_{k+1 mod 3}).
  std::vector<std::array<int, 3>> triangle_faces;
  std::vector<double> h_T;
  Box box;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_faces() const { return static_cast<int>(faces.size()); }

  Vec2 vertex(int v) const { return vertices[static_cast<size_t>(v)]; }
  const std::array<int, 3>& tri(int t) const { return triangles[static_cast<size_t>(t)]; }
  double area(int t) const {
    const auto& tv = tri(t);
    return signed_area(vertex(tv[0]), vertex(tv[1]), vertex(tv[2]));
  }
  Vec2 barycenter(int t) const {
    const auto& tv = tri(t);
    return (vertex(tv[0]) + vertex(tv[1]) + vertex(tv[2])) / 3.0;
  }
  double face_length(int f) const {
    const Face& fc = faces[static_cast<size_t>(f)];
    return (vertex(fc.vertices[1]) - vertex(fc.vertices[0])).norm();
  }
  /// Unit normal of face f, pointing from tri0 towards tri1 (or outward from
  /// tri0 for boundary faces).
  Vec2 face_normal(int f) const;
  /// The triangle adjacent to f other than t, or -1.
  int face_neighbor(int f, int t) const {
    const Face& fc = faces[static_cast<size_t>(f)];
    return fc.tri0 == t ? fc.tri1 : fc.tri0;
  }
};

/// 2 n^2 congruent right triangles on an n x n grid with all diagonals running
/// lower-left to upper-right. Deterministic vertex and face ordering.
BackgroundMesh generate_structured_mesh(int n, const Box& box);

enum class ElementLabel { interior, cut, exterior };

struct ElementClassification {
  int element_id = -1;
  ElementLabel label = ElementLabel::exterior;
  double inside_area_fraction = 0.0;
  /// Stored (possibly perturbed) signs of the level set at the 3 vertices.
  std::array<int, 3> vertex_signs{0, 0, 0};
  /// For cut elements: local edge indices crossed by the interface and the
  /// corresponding edge roots, ordered by local edge index.
  std::array<int, 2> cut_edge_local{-1, -1};
  std::array<Vec2, 2> edge_roots{};
};

/// Active mesh extracted from a classification: the elements of the
/// background mesh that intersect the physical domain, the cut subset, and
/// the face sets used by the stabilization terms.
struct ActiveMesh {
  std::vector<int> active_elements;    // T_h, sorted
  std::vector<int> cut_elements;       // elements intersected by the boundary
  std::vector<int> interior_elements;  // active minus cut
  std::vector<int> interior_faces_cut; // faces with both neighbors cut
  std::vector<int> all_faces_active;   // faces of active elements
  std::vector<int> mesh_boundary_faces;// faces on the boundary of the mesh domain

  /// Per background element: label (exterior if not active).
  std::vector<ElementLabel> labels;
  /// Background vertex ids of active elements, sorted.
  std::vector<int> active_vertices;
  /// h reported for convergence tables: 1/sqrt(#active vertices).
  double reported_h = 0.0;

  bool is_active(int t) const { return labels[static_cast<size_t>(t)] != ElementLabel::exterior; }
  bool is_cut(int t) const { return labels[static_cast<size_t>(t)] == ElementLabel::cut; }
  int num_active() const { return static_cast<int>(active_elements.size()); }
};

ActiveMesh extract_active_mesh(const BackgroundMesh& mesh,
                               const std::vector<ElementClassification>& classification);

/// Faces entering the ghost penalty: faces of cut elements that are not on
/// the boundary of the mesh domain (the neighbor on the other side is active).
std::vector<int> ghost_penalty_faces(const BackgroundMesh& mesh, const ActiveMesh& active);

/// Sub-simplex partition of one macro element: the interior point x_T
/// (barycenter), one point x_F per face, and the 6 sub-triangles they induce.
struct MacroPartition {
  int element_id = -1;
  Vec2 x_T;
  std::array<Vec2, 3> x_F;
  /// Sub-triangle 2k   = (v_k, x_F[k], x_T)
  /// Sub-triangle 2k+1 = (x_F[k], v_{k+1}, x_T), k = local face index.
  std::array<std::array<Vec2, 3>, 6> sub_triangles;

  double sub_area(int s) const {
    const auto& st = sub_triangles[static_cast<size_t>(s)];
    return signed_area(st[0], st[1], st[2]);
  }
};

/// Point x_F for a face: intersection of the segment between the adjacent
/// barycenters with the face when both neighbors are active, face midpoint
/// otherwise. Computed once per face so both adjacent partitions share the
/// value bit for bit.
std::vector<Vec2> compute_face_points(const BackgroundMesh& mesh, const ActiveMesh& active);

/// Macro partitions for all background elements that are active; indexed by
/// background element id (inactive entries keep element_id = -1).
std::vector<MacroPartition> build_macro_partition(const BackgroundMesh& mesh,
                                                  const ActiveMesh& active);

/// Locate the sub-triangle of a partition containing the point. Ties on
/// shared sub-edges resolve to the lowest sub-triangle index.
int locate_sub_triangle(const MacroPartition& part, const Vec2& p, double tol_scale = 1e-10);

/// Legacy ASCII VTK dump of the background mesh (POLYDATA triangles) with the
/// classification labels as cell data.
void write_mesh_vtk(const std::string& path, const BackgroundMesh& mesh,
                    const std::vector<ElementClassification>& classification);

}  // namespace cutstokes
