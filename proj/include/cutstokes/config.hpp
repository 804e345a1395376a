#pragma once

#include <string>
#include <vector>

#include "cutstokes/assembly.hpp"
#include "cutstokes/mesh.hpp"

namespace cutstokes {

/// Run configuration. Every key has a default so an empty file (or no file)
/// runs the standard convergence study on the disk.
struct RunConfig {
  std::string geometry = "disk";
  Vec2 center{0.0, 0.0};
  double radius = 0.5;
  Box box;
  std::vector<int> mesh_sizes{16, 32, 64, 128};
  Formulation formulation = Formulation::lagrange;
  SystemParameters params;
  std::vector<double> omegas{0.0, 100.0, 1000.0, 10000.0};
  int quad_order = 2;
  int boundary_quad_order = 2;
  int boundary_subdivisions = 4;
  std::string output_dir = "out";

  void validate() const;
};

/// Flat key = value file; '#' starts a comment, lists are comma separated.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

}  // namespace cutstokes
