#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adiascat/config.hpp"
#include "adiascat/error.hpp"
#include "adiascat/experiments.hpp"

namespace {

using adiascat::ExperimentConfig;

void print_diagnostics(const std::vector<adiascat::Diagnostic>& diags) {
  for (const auto& d : diags) std::cerr << "  " << d.field << ": " << d.message << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adiabatic scattering experiments on chiral channels"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::vector<double> omega;
  std::vector<double> eps;
  std::optional<int> grid_n;
  std::optional<long> seed;

  auto* run = app.add_subcommand("run", "run an experiment and write results.csv / summary.json");
  run->add_option("--config", config_path, "INI config file")->required();
  run->add_option("--out", out_dir, "output directory (overrides [output] dir)");
  run->add_option("--omega", omega, "comma-separated omega values")->delimiter(',');
  run->add_option("--eps", eps, "comma-separated eps values")->delimiter(',');
  run->add_option("--grid-n", grid_n, "grid points");
  run->add_option("--seed", seed, "random seed");

  auto* check = app.add_subcommand("validate", "check a config without running it");
  check->add_option("--config", config_path, "INI config file")->required();

  CLI11_PARSE(app, argc, argv);

  ExperimentConfig config;
  try {
    config = ExperimentConfig::from_file(config_path);
  } catch (const adiascat::ValidationError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 1;
  }
  if (!omega.empty()) config.sweep.omega = omega;
  if (!eps.empty()) config.sweep.eps = eps;
  if (grid_n) config.grid.n = *grid_n;
  if (seed) {
    if (*seed < 0) {
      std::cerr << "invalid config: seed: must be non-negative\n";
      return 1;
    }
    config.seed = static_cast<std::uint64_t>(*seed);
  }
  if (out_dir) config.out_dir = *out_dir;

  if (check->parsed()) {
    const auto diags = adiascat::validate(config);
    if (diags.empty()) {
      std::cout << "ok\n";
      return 0;
    }
    std::cerr << diags.size() << " problem(s):\n";
    print_diagnostics(diags);
    return 1;
  }

  adiascat::RunResult result;
  try {
    result = adiascat::run_to_directory(config, config.out_dir);
  } catch (const adiascat::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  for (const auto& c : result.criteria)
    std::cout << "criterion " << c.id << ": " << (c.pass ? "pass" : "FAIL") << "  " << c.detail << "\n";
  if (!result.diagnostics.empty()) print_diagnostics(result.diagnostics);
  std::cout << "wrote " << (config.out_dir / "results.csv").string() << " (" << result.rows.size() << " rows)\n";
  return static_cast<int>(result.status);
}
