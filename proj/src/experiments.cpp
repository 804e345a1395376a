#include "cutstokes/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "cutstokes/discretization.hpp"
#include "cutstokes/fields.hpp"
#include "cutstokes/vtk.hpp"

namespace cutstokes {

namespace {

SaddleSystem build_system(const Discretization& d, const RunConfig& config, const VectorField& f,
                          const VectorField& u_gamma) {
  const AssemblyContext ctx = d.context();
  if (config.formulation == Formulation::lagrange)
    return build_lagrange_system(ctx, config.params, f, u_gamma);
  return build_nitsche_system(ctx, config.params, f, u_gamma);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_errors_csv(const std::string& path, const ConvergenceResult& result,
                      const std::vector<int>& mesh_sizes) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "n,h,e_u_L2,e_u_H1,e_u_H1_semi,e_p_interior,e_p_extended,e_lambda_L2Gamma,div_max\n";
  for (size_t i = 0; i < result.reports.size(); ++i) {
    const ErrorReport& r = result.reports[i];
    out << mesh_sizes[i] << "," << format_double(r.h) << "," << format_double(r.e_u_L2) << ","
        << format_double(r.e_u_H1) << "," << format_double(r.e_u_H1_semi) << ","
        << format_double(r.e_p_interior) << "," << format_double(r.e_p_extended) << ","
        << format_double(r.e_lambda_L2Gamma) << "," << format_double(r.div_max) << "\n";
  }
  if (!result.rates.empty()) {
    const auto rt = result.last_rates();
    out << "rate,," << format_double(rt.e_u_L2) << "," << format_double(rt.e_u_H1) << ","
        << format_double(rt.e_u_H1_semi) << "," << format_double(rt.e_p_interior) << ","
        << format_double(rt.e_p_extended) << "," << format_double(rt.e_lambda_L2Gamma) << ",\n";
  }
}

void write_rates_csv(const std::string& path, const ConvergenceResult& result,
                     const std::vector<int>& mesh_sizes) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "from_n,to_n,e_u_L2,e_u_H1,e_u_H1_semi,e_p_interior,e_p_extended,e_lambda_L2Gamma\n";
  for (size_t i = 0; i < result.rates.size(); ++i) {
    const auto& rt = result.rates[i];
    out << mesh_sizes[i] << "," << mesh_sizes[i + 1] << "," << format_double(rt.e_u_L2) << ","
        << format_double(rt.e_u_H1) << "," << format_double(rt.e_u_H1_semi) << ","
        << format_double(rt.e_p_interior) << "," << format_double(rt.e_p_extended) << ","
        << format_double(rt.e_lambda_L2Gamma) << "\n";
  }
}

double rate_of(double coarse, double fine) { return std::log2(coarse / fine); }

}  // namespace

namespace {

ConvergenceResult convergence_study_impl(const RunConfig& config, bool write_finest_fields) {
  config.validate();
  const ExactStokesSolution exact = boundary_driven_solution();
  const VectorField f = VectorField::zero();

  ConvergenceResult result;
  for (int n : config.mesh_sizes) {
    Discretization d = build_discretization(n, config);
    SaddleSystem sys = build_system(d, config, f, exact.velocity);
    double residual = 0.0;
    Eigen::VectorXd x;
    try {
      x = solve_direct(sys, &residual);
    } catch (const std::exception& err) {
      throw std::runtime_error("convergence study failed at n = " + std::to_string(n) + ": " +
                               err.what());
    }
    const FieldCoefficients sol = split_solution(sys, x);
    ErrorReport rep = compute_errors(d.context(), d.geom, d.classification, exact, sol);
    rep.n = n;
    rep.residual = residual;
    result.reports.push_back(rep);
    if (write_finest_fields && n == config.mesh_sizes.back())
      write_fields_vtk(config.output_dir + "/fields_n" + std::to_string(n) + ".vtk", d, sol);
  }
  for (size_t i = 0; i + 1 < result.reports.size(); ++i) {
    const ErrorReport& c = result.reports[i];
    const ErrorReport& f2 = result.reports[i + 1];
    result.rates.push_back({rate_of(c.e_u_L2, f2.e_u_L2), rate_of(c.e_u_H1, f2.e_u_H1),
                            rate_of(c.e_u_H1_semi, f2.e_u_H1_semi),
                            rate_of(c.e_p_interior, f2.e_p_interior),
                            rate_of(c.e_p_extended, f2.e_p_extended),
                            rate_of(c.e_lambda_L2Gamma, f2.e_lambda_L2Gamma)});
  }
  return result;
}

}  // namespace

ConvergenceResult convergence_study(const RunConfig& config) {
  return convergence_study_impl(config, false);
}

ConvergenceResult run_convergence(const RunConfig& config) {
  std::filesystem::create_directories(config.output_dir);
  const ConvergenceResult result = convergence_study_impl(config, true);
  write_errors_csv(config.output_dir + "/errors.csv", result, config.mesh_sizes);
  write_rates_csv(config.output_dir + "/rates.csv", result, config.mesh_sizes);
  return result;
}

CoriolisResult coriolis_study(const RunConfig& config) {
  config.validate();
  const int n = config.mesh_sizes.back();
  const VectorField u_gamma = VectorField::constant({1.0, 0.0});
  const VectorField f = VectorField::zero();

  Discretization d =
      build_discretization(n, config.box, geometry_from_config(config), Formulation::lagrange,
                           config.quad_order, config.boundary_quad_order,
                           config.boundary_subdivisions);
  const AssemblyContext ctx = d.context();

  CoriolisResult result;
  for (double omega : config.omegas) {
    SystemParameters params = config.params;
    params.omega = omega;
    SaddleSystem sys = build_lagrange_system(ctx, params, f, u_gamma);
    const FieldCoefficients sol = split_solution(sys, solve_direct(sys));

    double uy2 = 0.0, ux2 = 0.0;
    for (int t : d.active.active_elements) {
      const CutCellQuadrature& q = d.cut_quad[static_cast<size_t>(t)];
      const std::array<int, 9> g = element_velocity_dofs(d.mesh, d.dofs, t);
      for (size_t i = 0; i < q.points.size(); ++i) {
        Vec2 u{0, 0};
        for (int k = 0; k < 9; ++k) {
          u += d.bases[static_cast<size_t>(t)].fn[static_cast<size_t>(k)].value(q.sub_tri[i],
                                                                                q.points[i]) *
               sol.velocity[g[static_cast<size_t>(k)]];
        }
        uy2 += q.weights[i] * u.y * u.y;
        ux2 += q.weights[i] * u.x * u.x;
      }
    }
    double uy_boundary = 0.0;
    for (int t : d.active.cut_elements) {
      const BoundaryQuadrature& q = d.boundary_quad[static_cast<size_t>(t)];
      for (size_t i = 0; i < q.points.size(); ++i) {
        const VelocitySample s =
            eval_velocity(d.mesh, d.dofs, d.partitions, d.bases, sol.velocity, t, q.points[i]);
        uy_boundary = std::max(uy_boundary, std::abs(s.value.y));
      }
    }
    result.omegas.push_back(omega);
    result.u_y_L2.push_back(std::sqrt(uy2));
    result.u_x_L2.push_back(std::sqrt(ux2));
    result.u_y_boundary.push_back(uy_boundary);

    if (!config.output_dir.empty()) {
      std::filesystem::create_directories(config.output_dir);
      char name[64];
      std::snprintf(name, sizeof(name), "fields_omega_%g.vtk", omega);
      write_fields_vtk(config.output_dir + "/" + name, d, sol);
    }
  }
  return result;
}

CoriolisResult run_coriolis(const RunConfig& config) {
  std::filesystem::create_directories(config.output_dir);
  const CoriolisResult result = coriolis_study(config);
  std::ofstream out(config.output_dir + "/coriolis.csv");
  out << "omega,u_y_L2,u_y_boundary_max,u_x_L2\n";
  for (size_t i = 0; i < result.omegas.size(); ++i) {
    out << format_double(result.omegas[i]) << "," << format_double(result.u_y_L2[i]) << ","
        << format_double(result.u_y_boundary[i]) << "," << format_double(result.u_x_L2[i]) << "\n";
  }
  return result;
}

SolveResult run_solve(const RunConfig& config, int n) {
  std::filesystem::create_directories(config.output_dir);
  const ExactStokesSolution exact = boundary_driven_solution();
  Discretization d = build_discretization(n, config);
  SaddleSystem sys = build_system(d, config, VectorField::zero(), exact.velocity);
  SolveResult out;
  const Eigen::VectorXd x = solve_direct(sys, &out.residual);
  const FieldCoefficients sol = split_solution(sys, x);
  out.report = compute_errors(d.context(), d.geom, d.classification, exact, sol);
  out.report.n = n;
  out.report.residual = out.residual;
  write_fields_vtk(config.output_dir + "/fields_n" + std::to_string(n) + ".vtk", d, sol);
  write_mesh_vtk(config.output_dir + "/mesh_n" + std::to_string(n) + ".vtk", d.mesh,
                 d.classification);
  return out;
}

}  // namespace cutstokes
