#include "cutstokes/vtk.hpp"

#include <fstream>
#include <stdexcept>

namespace cutstokes {

void write_fields_vtk(const std::string& path, const Discretization& d,
                      const FieldCoefficients& solution) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_fields_vtk: cannot open " + path);
  out.precision(12);

  const int n_elem = d.active.num_active();
  const int n_points = 7 * n_elem;
  const int n_cells = 6 * n_elem;

  const Eigen::VectorXd extended = extend_pressure(solution.pressure, d.mesh, d.active, d.dofs);
  const AssemblyContext ctx = d.context();
  const DivergenceField div = compute_divergence_field(ctx, solution.velocity);

  out << "# vtk DataFile Version 3.0\n";
  out << "cutstokes fields\n";
  out << "ASCII\n";
  out << "DATASET POLYDATA\n";
  out << "POINTS " << n_points << " double\n";
  for (int t : d.active.active_elements) {
    const auto& tv = d.mesh.tri(t);
    const MacroPartition& part = d.partitions[static_cast<size_t>(t)];
    for (int k = 0; k < 3; ++k) {
      const Vec2 v = d.mesh.vertex(tv[k]);
      out << v.x << " " << v.y << " 0\n";
    }
    for (int k = 0; k < 3; ++k)
      out << part.x_F[static_cast<size_t>(k)].x << " " << part.x_F[static_cast<size_t>(k)].y << " 0\n";
    out << part.x_T.x << " " << part.x_T.y << " 0\n";
  }

  out << "POLYGONS " << n_cells << " " << 4 * n_cells << "\n";
  for (int e = 0; e < n_elem; ++e) {
    const int base = 7 * e;
    // Local point layout: 0..2 vertices, 3..5 face points, 6 center.
    for (int k = 0; k < 3; ++k) {
      out << "3 " << base + k << " " << base + 3 + k << " " << base + 6 << "\n";
      out << "3 " << base + 3 + k << " " << base + (k + 1) % 3 << " " << base + 6 << "\n";
    }
  }

  out << "POINT_DATA " << n_points << "\n";
  out << "VECTORS velocity double\n";
  for (int t : d.active.active_elements) {
    const auto& tv = d.mesh.tri(t);
    const MacroPartition& part = d.partitions[static_cast<size_t>(t)];
    auto emit = [&](const Vec2& p) {
      const VelocitySample s =
          eval_velocity(d.mesh, d.dofs, d.partitions, d.bases, solution.velocity, t, p);
      out << s.value.x << " " << s.value.y << " 0\n";
    };
    for (int k = 0; k < 3; ++k) emit(d.mesh.vertex(tv[k]));
    for (int k = 0; k < 3; ++k) emit(part.x_F[static_cast<size_t>(k)]);
    emit(part.x_T);
  }

  out << "CELL_DATA " << n_cells << "\n";
  out << "VECTORS velocity_cell double\n";
  for (int t : d.active.active_elements) {
    const MacroPartition& part = d.partitions[static_cast<size_t>(t)];
    for (int s = 0; s < 6; ++s) {
      const auto& st = part.sub_triangles[static_cast<size_t>(s)];
      const Vec2 c = (st[0] + st[1] + st[2]) / 3.0;
      const VelocitySample v =
          eval_velocity(d.mesh, d.dofs, d.partitions, d.bases, solution.velocity, t, c);
      out << v.value.x << " " << v.value.y << " 0\n";
    }
  }
  auto cell_scalar = [&](const std::string& name, auto&& value_of_element) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int t : d.active.active_elements) {
      const double v = value_of_element(t);
      for (int s = 0; s < 6; ++s) out << v << "\n";
    }
  };
  cell_scalar("pressure", [&](int t) {
    return solution.pressure[d.dofs.pressure_dof(t) - d.dofs.pressure_offset];
  });
  cell_scalar("extended_pressure",
              [&](int t) { return extended[d.dofs.pressure_dof(t) - d.dofs.pressure_offset]; });
  cell_scalar("divergence", [&](int t) { return div.per_element[static_cast<size_t>(t)]; });
  cell_scalar("label", [&](int t) { return d.active.is_cut(t) ? 1.0 : 0.0; });
  if (d.dofs.multiplier_components == 2) {
    out << "VECTORS multiplier double\n";
    for (int t : d.active.active_elements) {
      Vec2 lam{0, 0};
      if (d.active.is_cut(t)) {
        lam = {solution.multiplier[d.dofs.multiplier_dof(t, 0) - d.dofs.multiplier_offset],
               solution.multiplier[d.dofs.multiplier_dof(t, 1) - d.dofs.multiplier_offset]};
      }
      for (int s = 0; s < 6; ++s) out << lam.x << " " << lam.y << " 0\n";
    }
  } else {
    cell_scalar("boundary_pressure", [&](int t) {
      return d.active.is_cut(t)
                 ? solution.multiplier[d.dofs.multiplier_dof(t, 0) - d.dofs.multiplier_offset]
                 : 0.0;
    });
  }
}

}  // namespace cutstokes
