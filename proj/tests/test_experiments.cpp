#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cutstokes/config.hpp"
#include "cutstokes/discretization.hpp"
#include "cutstokes/experiments.hpp"
#include "cutstokes/vtk.hpp"

using namespace cutstokes;

TEST_CASE("config defaults and parsing") {
  const RunConfig defaults = parse_config_text("");
  CHECK(defaults.geometry == "disk");
  CHECK(defaults.radius == 0.5);
  CHECK(defaults.mesh_sizes == std::vector<int>{16, 32, 64, 128});
  CHECK(defaults.formulation == Formulation::lagrange);
  CHECK(defaults.params.gamma == 1.0);
  CHECK(defaults.params.gamma0 == 10.0);
  CHECK(defaults.params.curl_weight == 1.0);

  const RunConfig cfg = parse_config_text(
      "# comment\n"
      "geometry = disk\n"
      "center = 0.1, -0.2\n"
      "radius = 0.4\n"
      "box = -1, 1\n"
      "mesh_sizes = 8, 16\n"
      "formulation = nitsche\n"
      "gamma0 = 20\n"
      "curl_weight = 0\n"
      "omega = 0, 10\n"
      "output_dir = /tmp/cutstokes_test\n");
  CHECK(cfg.center.x == 0.1);
  CHECK(cfg.center.y == -0.2);
  CHECK(cfg.radius == 0.4);
  CHECK(cfg.mesh_sizes == std::vector<int>{8, 16});
  CHECK(cfg.formulation == Formulation::nitsche);
  CHECK(cfg.params.gamma0 == 20.0);
  CHECK(cfg.params.curl_weight == 0.0);
  CHECK(cfg.omegas == std::vector<double>{0.0, 10.0});

  CHECK_THROWS(parse_config_text("mesh_sizes = 16, 8\n"));
  CHECK_THROWS(parse_config_text("gamma = -1\n"));
  CHECK_THROWS(parse_config_text("unknown_key = 1\n"));
  CHECK_THROWS(parse_config_text("geometry = sphere\n"));
}

TEST_CASE("single-mesh solve writes fields and reports the residual") {
  RunConfig cfg;
  cfg.output_dir = "/tmp/cutstokes_run_solve";
  std::filesystem::remove_all(cfg.output_dir);
  const SolveResult result = run_solve(cfg, 16);
  CHECK(result.residual < 1e-9);
  CHECK(result.report.div_max <= 1e-8 * result.report.u_H1_norm);

  const std::string path = cfg.output_dir + "/fields_n16.vtk";
  REQUIRE(std::filesystem::exists(path));

  // Re-read the file: header intact, point count matches the sub-triangulation.
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line.find("vtk DataFile") != std::string::npos);
  int points = -1, polygons = -1;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "POINTS") ss >> points;
    if (tag == "POLYGONS") ss >> polygons;
  }
  const Discretization d = build_discretization(16, cfg);
  CHECK(points == 7 * d.active.num_active());
  CHECK(polygons == 6 * d.active.num_active());
  CHECK(std::filesystem::exists(cfg.output_dir + "/mesh_n16.vtk"));
}

TEST_CASE("convergence experiment writes stable csv schema") {
  RunConfig cfg;
  cfg.mesh_sizes = {8, 16};
  cfg.output_dir = "/tmp/cutstokes_run_conv";
  std::filesystem::remove_all(cfg.output_dir);
  const ConvergenceResult result = run_convergence(cfg);
  CHECK(result.reports.size() == 2);
  CHECK(result.rates.size() == 1);

  std::ifstream in(cfg.output_dir + "/errors.csv");
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "n,h,e_u_L2,e_u_H1,e_u_H1_semi,e_p_interior,e_p_extended,e_lambda_L2Gamma,div_max");
  std::vector<std::string> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(line);
  }
  REQUIRE(rows.size() == 3);  // two meshes plus the rate row
  CHECK(rows[0].substr(0, 2) == "8,");
  CHECK(rows[1].substr(0, 3) == "16,");
  CHECK(rows[2].substr(0, 5) == "rate,");
  CHECK(std::filesystem::exists(cfg.output_dir + "/rates.csv"));
  CHECK(std::filesystem::exists(cfg.output_dir + "/fields_n16.vtk"));

  // Bit-reproducible output for a fixed config.
  std::stringstream first;
  first << std::ifstream(cfg.output_dir + "/errors.csv").rdbuf();
  run_convergence(cfg);
  std::stringstream second;
  second << std::ifstream(cfg.output_dir + "/errors.csv").rdbuf();
  CHECK(first.str() == second.str());
}

TEST_CASE("coriolis study: rest state exact, growth with omega") {
  RunConfig cfg;
  cfg.mesh_sizes = {16};  // the study runs on the finest configured mesh
  cfg.omegas = {0.0, 100.0};
  cfg.output_dir = "/tmp/cutstokes_run_coriolis";
  std::filesystem::remove_all(cfg.output_dir);
  const CoriolisResult result = run_coriolis(cfg);
  REQUIRE(result.omegas.size() == 2);
  // At rest the constant flow is an exact discrete solution.
  CHECK(result.u_y_L2[0] <= 1e-3 * result.u_x_L2[0]);
  CHECK(result.u_y_L2[1] > result.u_y_L2[0]);
  CHECK(std::filesystem::exists(cfg.output_dir + "/coriolis.csv"));
  CHECK(std::filesystem::exists(cfg.output_dir + "/fields_omega_0.vtk"));
  CHECK(std::filesystem::exists(cfg.output_dir + "/fields_omega_100.vtk"));
}
