#pragma once

#include <string>
#include <vector>

#include "cutstokes/config.hpp"
#include "cutstokes/solve.hpp"

namespace cutstokes {

struct ConvergenceResult {
  std::vector<ErrorReport> reports;  // one per mesh size
  /// Observed rates between consecutive meshes, log2 of the error ratio;
  /// rates[i] compares reports[i] to reports[i+1].
  struct Rates {
    double e_u_L2, e_u_H1, e_u_H1_semi, e_p_interior, e_p_extended, e_lambda_L2Gamma;
  };
  std::vector<Rates> rates;
  Rates last_rates() const { return rates.back(); }
};

/// The boundary-driven convergence study: assemble, solve and post-process on
/// every configured mesh, write errors.csv / rates.csv and the fields of the
/// finest mesh into the output directory.
ConvergenceResult run_convergence(const RunConfig& config);

/// Convergence study without file output (used by tests).
ConvergenceResult convergence_study(const RunConfig& config);

struct CoriolisResult {
  std::vector<double> omegas;
  std::vector<double> u_y_L2;         // ||u_y|| over the physical domain
  std::vector<double> u_y_boundary;   // max |u_y| at the boundary quadrature points
  std::vector<double> u_x_L2;
};

/// Pressure-robustness study: rotating forcing with boundary data (1, 0) on
/// the disk, solved with the Lagrange formulation for each omega.
CoriolisResult run_coriolis(const RunConfig& config);
CoriolisResult coriolis_study(const RunConfig& config);

struct SolveResult {
  ErrorReport report;
  double residual = 0.0;
};

/// Single-mesh solve with field dumps.
SolveResult run_solve(const RunConfig& config, int n);

}  // namespace cutstokes
