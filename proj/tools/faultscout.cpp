#include <CLI11.hpp>

#include <iostream>

#include "faultscout/driver.hpp"

namespace {

int run_command(const std::string& config_path) {
  auto cfg = faultscout::parse_config_file(config_path);
  auto artifacts = faultscout::cmd_run(cfg);
  for (const auto& f : artifacts.csv_files) std::cout << "wrote " << f << "\n";
  for (const auto& f : artifacts.ply_files) std::cout << "wrote " << f << "\n";
  if (!artifacts.svg_file.empty()) std::cout << "wrote " << artifacts.svg_file << "\n";
  std::cout << "wrote " << artifacts.ledger_file << "\n";
  std::cout << "wrote " << artifacts.manifest_file << "\n";
  std::cout << faultscout::io::ledger_report(artifacts.ledger);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"detects and approximates interfaces of piecewise constant classifiers"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run a configured reconstruction");
  run->add_option("config", config_path, "configuration file")->required();

  std::string query_dir;
  double qx = 0.0, qy = 0.0;
  auto* query = app.add_subcommand("query", "classify a point against a reconstruction");
  query->add_option("dir", query_dir, "output directory of a previous run")->required();
  query->add_option("x", qx, "x coordinate")->required();
  query->add_option("y", qy, "y coordinate")->required();

  std::string plot_dir, plot_out;
  auto* plot = app.add_subcommand("plot", "render a reconstruction to SVG");
  plot->add_option("dir", plot_dir, "output directory of a previous run")->required();
  plot->add_option("out", plot_out, "SVG output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(config_path);
    if (query->parsed()) {
      std::cout << faultscout::cmd_query(query_dir, qx, qy) << "\n";
      return 0;
    }
    if (plot->parsed()) {
      std::cout << "wrote " << faultscout::cmd_plot(plot_dir, plot_out) << "\n";
      return 0;
    }
  } catch (const faultscout::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
