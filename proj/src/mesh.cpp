#include "cutstokes/mesh.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

namespace cutstokes {

Vec2 BackgroundMesh::face_normal(int f) const {
  const Face& fc = faces[static_cast<size_t>(f)];
  const Vec2 a = vertex(fc.vertices[0]);
  const Vec2 b = vertex(fc.vertices[1]);
  Vec2 n = (b - a).perp().normalized();
  // Orient away from tri0: the opposite vertex of tri0 sits on the negative side.
  const auto& tv = tri(fc.tri0);
  int opp = -1;
  for (int k = 0; k < 3; ++k) {
    if (tv[k] != fc.vertices[0] && tv[k] != fc.vertices[1]) opp = tv[k];
  }
  assert(opp >= 0);
  const Vec2 mid = (a + b) * 0.5;
  if (n.dot(vertex(opp) - mid) > 0.0) n = -n;
  return n;
}

BackgroundMesh generate_structured_mesh(int n, const Box& box) {
  if (n < 2) throw std::invalid_argument("generate_structured_mesh: n must be >= 2");
  BackgroundMesh mesh;
  mesh.box = box;
  const int nv = n + 1;
  mesh.vertices.reserve(static_cast<size_t>(nv) * nv);
  for (int iy = 0; iy < nv; ++iy) {
    for (int ix = 0; ix < nv; ++ix) {
      const double x = box.lo.x + (box.hi.x - box.lo.x) * ix / n;
      const double y = box.lo.y + (box.hi.y - box.lo.y) * iy / n;
      mesh.vertices.push_back({x, y});
    }
  }
  mesh.triangles.reserve(static_cast<size_t>(2) * n * n);
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const int v00 = iy * nv + ix;
      const int v10 = v00 + 1;
      const int v01 = v00 + nv;
      const int v11 = v01 + 1;
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }
  mesh.h_T.resize(mesh.triangles.size());
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tv = mesh.triangles[t];
    double h = 0.0;
    for (int k = 0; k < 3; ++k) {
      h = std::max(h, (mesh.vertex(tv[k]) - mesh.vertex(tv[(k + 1) % 3])).norm());
    }
    mesh.h_T[t] = h;
  }

  mesh.triangle_faces.resize(mesh.triangles.size());
  std::map<std::pair<int, int>, int> face_of;
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tv = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      const int a = tv[k];
      const int b = tv[(k + 1) % 3];
      const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
      auto it = face_of.find(key);
      if (it == face_of.end()) {
        Face fc;
        fc.vertices = {key.first, key.second};
        fc.tri0 = static_cast<int>(t);
        const int id = static_cast<int>(mesh.faces.size());
        mesh.faces.push_back(fc);
        face_of.emplace(key, id);
        mesh.triangle_faces[t][static_cast<size_t>(k)] = id;
      } else {
        Face& fc = mesh.faces[static_cast<size_t>(it->second)];
        assert(fc.tri1 < 0);
        fc.tri1 = static_cast<int>(t);
        mesh.triangle_faces[t][static_cast<size_t>(k)] = it->second;
      }
    }
  }
  return mesh;
}

ActiveMesh extract_active_mesh(const BackgroundMesh& mesh,
                               const std::vector<ElementClassification>& classification) {
  if (classification.size() != static_cast<size_t>(mesh.num_triangles()))
    throw std::invalid_argument("extract_active_mesh: incomplete classification");

  ActiveMesh active;
  active.labels.resize(classification.size(), ElementLabel::exterior);
  for (const auto& c : classification) {
    active.labels[static_cast<size_t>(c.element_id)] = c.label;
    if (c.label == ElementLabel::cut) active.cut_elements.push_back(c.element_id);
    if (c.label == ElementLabel::interior) active.interior_elements.push_back(c.element_id);
    if (c.label != ElementLabel::exterior) active.active_elements.push_back(c.element_id);
  }
  std::sort(active.active_elements.begin(), active.active_elements.end());
  std::sort(active.cut_elements.begin(), active.cut_elements.end());
  std::sort(active.interior_elements.begin(), active.interior_elements.end());
  if (active.active_elements.empty())
    throw std::runtime_error("extract_active_mesh: no element intersects the domain");

  std::set<int> vertex_set;
  for (int t : active.active_elements) {
    for (int v : mesh.tri(t)) vertex_set.insert(v);
  }
  active.active_vertices.assign(vertex_set.begin(), vertex_set.end());
  active.reported_h = 1.0 / std::sqrt(static_cast<double>(active.active_vertices.size()));

  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& fc = mesh.faces[static_cast<size_t>(f)];
    const bool a0 = active.is_active(fc.tri0);
    const bool a1 = fc.tri1 >= 0 && active.is_active(fc.tri1);
    if (!a0 && !a1) continue;
    active.all_faces_active.push_back(f);
    if (a0 != a1) active.mesh_boundary_faces.push_back(f);
    if (a0 && a1 && active.is_cut(fc.tri0) && active.is_cut(fc.tri1))
      active.interior_faces_cut.push_back(f);
  }
  return active;
}

std::vector<int> ghost_penalty_faces(const BackgroundMesh& mesh, const ActiveMesh& active) {
  std::vector<int> out;
  for (int f : active.all_faces_active) {
    const Face& fc = mesh.faces[static_cast<size_t>(f)];
    const bool a0 = active.is_active(fc.tri0);
    const bool a1 = fc.tri1 >= 0 && active.is_active(fc.tri1);
    if (!(a0 && a1)) continue;  // skip the mesh-domain boundary
    if (active.is_cut(fc.tri0) || active.is_cut(fc.tri1)) out.push_back(f);
  }
  return out;
}

std::vector<Vec2> compute_face_points(const BackgroundMesh& mesh, const ActiveMesh& active) {
  std::vector<Vec2> x_F(static_cast<size_t>(mesh.num_faces()));
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& fc = mesh.faces[static_cast<size_t>(f)];
    const Vec2 a = mesh.vertex(fc.vertices[0]);
    const Vec2 b = mesh.vertex(fc.vertices[1]);
    const bool a0 = active.is_active(fc.tri0);
    const bool a1 = fc.tri1 >= 0 && active.is_active(fc.tri1);
    if (a0 && a1) {
      const Vec2 c0 = mesh.barycenter(fc.tri0);
      const Vec2 c1 = mesh.barycenter(fc.tri1);
      const Vec2 d = c1 - c0;
      const Vec2 e = b - a;
      const double denom = d.cross(e);
      if (std::abs(denom) < 1e-30)
        throw std::logic_error("compute_face_points: barycenter segment parallel to face");
      const double t = (a - c0).cross(e) / denom;
      const Vec2 p = c0 + d * t;
      const double s = (p - a).dot(e) / e.squared_norm();
      if (!(s > 0.0 && s < 1.0))
        throw std::logic_error("compute_face_points: barycenter segment misses the face");
      x_F[static_cast<size_t>(f)] = p;
    } else {
      x_F[static_cast<size_t>(f)] = (a + b) * 0.5;
    }
  }
  return x_F;
}

std::vector<MacroPartition> build_macro_partition(const BackgroundMesh& mesh,
                                                  const ActiveMesh& active) {
  const std::vector<Vec2> x_F = compute_face_points(mesh, active);
  std::vector<MacroPartition> parts(static_cast<size_t>(mesh.num_triangles()));
  for (int t : active.active_elements) {
    MacroPartition& part = parts[static_cast<size_t>(t)];
    part.element_id = t;
    part.x_T = mesh.barycenter(t);
    const auto& tv = mesh.tri(t);
    for (int k = 0; k < 3; ++k) {
      const int f = mesh.triangle_faces[static_cast<size_t>(t)][static_cast<size_t>(k)];
      part.x_F[static_cast<size_t>(k)] = x_F[static_cast<size_t>(f)];
      const Vec2 vk = mesh.vertex(tv[k]);
      const Vec2 vk1 = mesh.vertex(tv[(k + 1) % 3]);
      part.sub_triangles[static_cast<size_t>(2 * k)] = {vk, part.x_F[static_cast<size_t>(k)], part.x_T};
      part.sub_triangles[static_cast<size_t>(2 * k + 1)] = {part.x_F[static_cast<size_t>(k)], vk1, part.x_T};
    }
    for (int s = 0; s < 6; ++s) assert(part.sub_area(s) > 0.0);
  }
  return parts;
}

int locate_sub_triangle(const MacroPartition& part, const Vec2& p, double tol_scale) {
  for (double tol : {tol_scale, 1e4 * tol_scale}) {
    for (int s = 0; s < 6; ++s) {
      const auto& st = part.sub_triangles[static_cast<size_t>(s)];
      const double area = signed_area(st[0], st[1], st[2]);
      const double l0 = signed_area(p, st[1], st[2]) / area;
      const double l1 = signed_area(st[0], p, st[2]) / area;
      const double l2 = signed_area(st[0], st[1], p) / area;
      if (l0 >= -tol && l1 >= -tol && l2 >= -tol) return s;
    }
  }
  throw std::runtime_error("locate_sub_triangle: point outside element");
}

void write_mesh_vtk(const std::string& path, const BackgroundMesh& mesh,
                    const std::vector<ElementClassification>& classification) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_mesh_vtk: cannot open " + path);
  out << "# vtk DataFile Version 3.0\n";
  out << "background mesh\n";
  out << "ASCII\n";
  out << "DATASET POLYDATA\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  out.precision(17);
  for (const Vec2& v : mesh.vertices) out << v.x << " " << v.y << " 0\n";
  out << "POLYGONS " << mesh.num_triangles() << " " << 4 * mesh.num_triangles() << "\n";
  for (const auto& tv : mesh.triangles) out << "3 " << tv[0] << " " << tv[1] << " " << tv[2] << "\n";
  out << "CELL_DATA " << mesh.num_triangles() << "\n";
  out << "SCALARS label int 1\nLOOKUP_TABLE default\n";
  for (const auto& c : classification) {
    out << (c.label == ElementLabel::interior ? 0 : (c.label == ElementLabel::cut ? 1 : 2)) << "\n";
  }
  out << "SCALARS inside_fraction double 1\nLOOKUP_TABLE default\n";
  for (const auto& c : classification) out << c.inside_area_fraction << "\n";
}

}  // namespace cutstokes
