#include "cutstokes/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cutstokes {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (geometry != "disk" && geometry != "generic")
    throw std::invalid_argument("config: unknown geometry '" + geometry + "'");
  if (radius <= 0.0) throw std::invalid_argument("config: radius must be positive");
  if (mesh_sizes.empty()) throw std::invalid_argument("config: mesh_sizes must not be empty");
  for (size_t i = 0; i + 1 < mesh_sizes.size(); ++i) {
    if (mesh_sizes[i] >= mesh_sizes[i + 1])
      throw std::invalid_argument("config: mesh_sizes must be strictly increasing");
  }
  for (int n : mesh_sizes)
    if (n < 2) throw std::invalid_argument("config: mesh sizes must be >= 2");
  if (params.gamma < 0 || params.gamma0 < 0 || params.gamma1 < 0 || params.gamma2 < 0 ||
      params.curl_weight < 0)
    throw std::invalid_argument("config: stabilization parameters must be >= 0");
  if (quad_order < 2 || boundary_quad_order < 2)
    throw std::invalid_argument("config: quadrature orders must be >= 2");
  if (!std::is_sorted(omegas.begin(), omegas.end()) || (!omegas.empty() && omegas.front() < 0.0))
    throw std::invalid_argument("config: omega list must be nonnegative and increasing");
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "geometry") {
      cfg.geometry = value;
    } else if (key == "center") {
      const auto v = parse_list(value);
      if (v.size() != 2) throw std::invalid_argument("config: center needs two numbers");
      cfg.center = {v[0], v[1]};
    } else if (key == "radius") {
      cfg.radius = std::stod(value);
    } else if (key == "box") {
      const auto v = parse_list(value);
      if (v.size() == 2) {
        cfg.box.lo = {v[0], v[0]};
        cfg.box.hi = {v[1], v[1]};
      } else if (v.size() == 4) {
        cfg.box.lo = {v[0], v[1]};
        cfg.box.hi = {v[2], v[3]};
      } else {
        throw std::invalid_argument("config: box needs 2 (square) or 4 numbers");
      }
    } else if (key == "mesh_sizes") {
      cfg.mesh_sizes.clear();
      for (double d : parse_list(value)) cfg.mesh_sizes.push_back(static_cast<int>(d));
    } else if (key == "formulation") {
      if (value == "lagrange") {
        cfg.formulation = Formulation::lagrange;
      } else if (value == "nitsche") {
        cfg.formulation = Formulation::nitsche;
      } else {
        throw std::invalid_argument("config: formulation must be lagrange or nitsche");
      }
    } else if (key == "gamma") {
      cfg.params.gamma = std::stod(value);
    } else if (key == "gamma0") {
      cfg.params.gamma0 = std::stod(value);
    } else if (key == "gamma1") {
      cfg.params.gamma1 = std::stod(value);
    } else if (key == "gamma2") {
      cfg.params.gamma2 = std::stod(value);
    } else if (key == "curl_weight") {
      cfg.params.curl_weight = std::stod(value);
    } else if (key == "omega") {
      cfg.omegas = parse_list(value);
    } else if (key == "quad_order") {
      cfg.quad_order = std::stoi(value);
    } else if (key == "boundary_quad_order") {
      cfg.boundary_quad_order = std::stoi(value);
    } else if (key == "boundary_subdivisions") {
      cfg.boundary_subdivisions = std::stoi(value);
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace cutstokes
