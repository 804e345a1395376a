#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "cutstokes/mesh.hpp"
#include "cutstokes/vec.hpp"

namespace cutstokes {

/// One local shape function of the composite element, stored as an affine
/// polynomial per macro sub-triangle and per component, plus the constant
/// gradient on each sub-triangle and the element-wide constant divergence.
struct LocalShapeFunction {
  /// coef[sub][comp] = {c0, cx, cy} with f(x, y) = c0 + cx x + cy y.
  std::array<std::array<std::array<double, 3>, 2>, 6> coef{};
  /// grad[sub](i, j) = d f_i / d x_j.
  std::array<Mat2, 6> grad{};
  double divergence = 0.0;

  Vec2 value(int sub, const Vec2& p) const {
    const auto& c = coef[static_cast<size_t>(sub)];
    return {c[0][0] + c[0][1] * p.x + c[0][2] * p.y, c[1][0] + c[1][1] * p.x + c[1][2] * p.y};
  }
};

/// The 9 local functions of one macro element: six vertex modes (hat of
/// vertex i times unit vector e_c at slot 2 i + c) and three face bubbles
/// (slot 6 + k for local face k), with the global orientation sign folded in.
struct MacroElementBasis {
  int element_id = -1;
  std::array<LocalShapeFunction, 9> fn;
};

/// Closed-form constant divergence of the face bubble on the element that
/// owns the face orientation: (1/(d+1)) / |x_F - x_T| with d = 2.
double face_bubble_divergence(const MacroPartition& part, int face_local_index);

/// Build the face bubble of one face of one element (orientation sign +1).
LocalShapeFunction build_face_bubble(const MacroPartition& part, int face_local_index);

/// Basis tables for every active element, indexed by background element id.
std::vector<MacroElementBasis> build_element_bases(const BackgroundMesh& mesh,
                                                   const ActiveMesh& active,
                                                   const std::vector<MacroPartition>& partitions);

/// Global indexing of the unknowns: two velocity components per active
/// vertex, one bubble coefficient per active face, one pressure value per
/// active element and `multiplier_components` values per cut element.
struct DofMap {
  int multiplier_components = 2;
  std::vector<int> vertex_index;       // background vertex -> compact index or -1
  std::vector<int> face_index;         // background face -> compact index or -1
  std::vector<int> element_index;      // background element -> compact index or -1
  std::vector<int> cut_element_index;  // background element -> cut index or -1
  int n_active_vertices = 0;
  int n_active_faces = 0;
  int n_active_elements = 0;
  int n_cut_elements = 0;
  int velocity_offset = 0;
  int pressure_offset = 0;
  int multiplier_offset = 0;
  int total = 0;

  int n_velocity() const { return pressure_offset; }
  int n_pressure() const { return n_active_elements; }
  int n_multiplier() const { return multiplier_components * n_cut_elements; }

  int vertex_dof(int bg_vertex, int comp) const {
    return 2 * vertex_index[static_cast<size_t>(bg_vertex)] + comp;
  }
  int face_dof(int bg_face) const {
    return 2 * n_active_vertices + face_index[static_cast<size_t>(bg_face)];
  }
  int pressure_dof(int bg_element) const {
    return pressure_offset + element_index[static_cast<size_t>(bg_element)];
  }
  int multiplier_dof(int bg_element, int comp) const {
    return multiplier_offset +
           multiplier_components * cut_element_index[static_cast<size_t>(bg_element)] + comp;
  }
};

DofMap build_dof_map(const BackgroundMesh& mesh, const ActiveMesh& active,
                     int multiplier_components);

/// Global velocity dof of each of the 9 local functions of an element.
std::array<int, 9> element_velocity_dofs(const BackgroundMesh& mesh, const DofMap& dofs,
                                         int element);

/// Coefficient vectors in DofMap ordering.
struct FieldCoefficients {
  Eigen::VectorXd velocity;
  Eigen::VectorXd pressure;
  Eigen::VectorXd multiplier;
};

struct VelocitySample {
  Vec2 value;
  Mat2 gradient;
  double divergence = 0.0;
};

/// Evaluate the discrete velocity in one element; the point must lie in the
/// closure of the element.
VelocitySample eval_velocity(const BackgroundMesh& mesh, const DofMap& dofs,
                             const std::vector<MacroPartition>& partitions,
                             const std::vector<MacroElementBasis>& bases,
                             const Eigen::VectorXd& velocity_dofs, int element, const Vec2& p);

/// Constant divergence of the discrete velocity on one element.
double element_divergence(const BackgroundMesh& mesh, const DofMap& dofs,
                          const std::vector<MacroElementBasis>& bases,
                          const Eigen::VectorXd& velocity_dofs, int element);

/// Max inter-element jump of every global basis function over all faces
/// shared by two active elements, sampled at 5 points per face sub-edge.
double continuity_audit(const BackgroundMesh& mesh, const ActiveMesh& active,
                        const std::vector<MacroPartition>& partitions,
                        const std::vector<MacroElementBasis>& bases, const DofMap& dofs);

}  // namespace cutstokes
