#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "faultscout/geometry.hpp"

namespace faultscout {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Run configuration parsed from a flat `key = value` file with `#`
/// comments. Lists are comma separated. Unknown keys are rejected so typos
/// do not silently fall back to defaults.
struct RunConfig {
  std::string problem;  // tp1 | tp3 | tp4 | tp5 | tp2_3d | mcda | scatter
  std::size_t n_init = 0;  // 0: problem-specific default
  std::string out_dir = "out";
  std::optional<std::vector<double>> domain_lower, domain_upper;
  Params params;
  bool deterministic = true;

  // mcda problem inputs
  std::string mcda_matrix;                  // csv path; empty: built-in demo matrix
  std::vector<double> mcda_weights;         // raw weights, normalized on use
  std::vector<std::string> mcda_variable;   // names of the variable criteria

  // scatter problem inputs
  std::string scatter_file;
  double scatter_threshold = 0.0;
  int svd_truncation = 0;       // 0: all terms
  bool svd_conjugate = false;   // adjoint instead of transpose expansion

  bool eps_cluster_given = false;
  bool eps_gap_given = false;
};

namespace detail {

inline std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

inline std::vector<std::string> parse_string_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    cell.erase(0, cell.find_first_not_of(" \t"));
    cell.erase(cell.find_last_not_of(" \t") + 1);
    out.push_back(cell);
  }
  return out;
}

inline bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("expected a boolean, got '" + s + "'");
}

}  // namespace detail

inline RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    try {
      auto& p = cfg.params;
      if (key == "problem") cfg.problem = value;
      else if (key == "n_init") cfg.n_init = std::stoul(value);
      else if (key == "out_dir") cfg.out_dir = value;
      else if (key == "domain_lower") cfg.domain_lower = detail::parse_double_list(value);
      else if (key == "domain_upper") cfg.domain_upper = detail::parse_double_list(value);
      else if (key == "deterministic") cfg.deterministic = detail::parse_bool(value);
      else if (key == "eps_b") p.eps_b = std::stod(value);
      else if (key == "eps_gap") { p.eps_gap = std::stod(value); cfg.eps_gap_given = true; }
      else if (key == "eps_err") p.eps_err = std::stod(value);
      else if (key == "eps_coarse") p.eps_coarse = std::stod(value);
      else if (key == "eps_safemin") p.eps_safemin = std::stod(value);
      else if (key == "eps_safemax") p.eps_safemax = std::stod(value);
      else if (key == "eps_cluster") { p.eps_cluster = std::stod(value); cfg.eps_cluster_given = true; }
      else if (key == "k_near") p.k_near = std::stoi(value);
      else if (key == "k_sort") p.k_sort = std::stoi(value);
      else if (key == "k_extra") p.k_extra = std::stoi(value);
      else if (key == "k_rep") p.k_rep = std::stoi(value);
      else if (key == "k_adap") p.k_adap = std::stoi(value);
      else if (key == "beta_angle") p.beta_angle = std::stod(value);
      else if (key == "beta_growth") p.beta_growth = std::stod(value);
      else if (key == "alpha_expand") p.alpha_expand = std::stod(value);
      else if (key == "alpha_expbound") p.alpha_expbound = std::stod(value);
      else if (key == "rbf_shape_scale") p.rbf_shape_scale = std::stod(value);
      else if (key == "morozov_max_iter") p.morozov_max_iter = std::stoi(value);
      else if (key == "min_triangle_angle_deg") p.min_triangle_angle_deg = std::stod(value);
      else if (key == "gap_edge_fraction") p.gap_edge_fraction = std::stod(value);
      else if (key == "max_fill_passes") p.max_fill_passes = std::stoi(value);
      else if (key == "mcda_matrix") cfg.mcda_matrix = value;
      else if (key == "mcda_weights") cfg.mcda_weights = detail::parse_double_list(value);
      else if (key == "mcda_variable") cfg.mcda_variable = detail::parse_string_list(value);
      else if (key == "scatter_file") cfg.scatter_file = value;
      else if (key == "scatter_threshold") cfg.scatter_threshold = std::stod(value);
      else if (key == "svd_truncation") cfg.svd_truncation = std::stoi(value);
      else if (key == "svd_conjugate") cfg.svd_conjugate = detail::parse_bool(value);
      else throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": bad value for '" + key + "': " +
                        e.what());
    }
  }
  if (cfg.problem.empty()) throw ConfigError("missing key 'problem'");
  if (!cfg.eps_cluster_given) cfg.params.eps_cluster = cfg.params.eps_gap / 5.0;
  try {
    cfg.params.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in);
}

}  // namespace faultscout
