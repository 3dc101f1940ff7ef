#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adiascat/adiabatic.hpp"
#include "adiascat/grid.hpp"
#include "adiascat/model.hpp"

namespace adiascat {

enum class ExperimentKind {
  coherent_props,
  soluble_exact,
  omega_scaling,
  epsilon_scaling,
  energy_shift,
  outgoing_state,
  combined
};

ExperimentKind parse_experiment(std::string_view name);
std::string_view to_string(ExperimentKind kind);

struct ModelSpec {
  enum class Kind { soluble, matrix, rank_one };

  Kind kind = Kind::soluble;
  std::vector<GaussianBump> bumps;  ///< soluble profile
  Schedule schedule{Schedule::Kind::tanh, 1.0, 0.0};
  double coupling_scale = 1.0;  ///< multiplies the two-channel matrix fixture
  int channels = 2;             ///< rank-one only
  double kappa = 1.0;
  int within_channel = -1;      ///< rank-one: -1 couples all channels equally
};

struct GridSpec {
  double x_min = -40.0;
  double x_max = 40.0;
  int n = 4096;
  std::optional<double> T;  ///< scattering time; default derived per eps
};

struct SweepSpec {
  std::vector<double> omega;
  std::vector<double> eps;
  std::vector<double> s;
  std::vector<double> e;
  int j = 0;
  int jp = 0;
  int trials = 0;
};

struct RhoSpec {
  std::string kind = "fermi";  ///< fermi | gaussian | polynomial | constant
  double center = 0.0;
  double width = 0.5;
  std::vector<double> coefficients;

  EnergyFunction build() const;
};

/// Fully resolved experiment description. Parsing starts from `defaults` of
/// the named experiment, so every field has a value.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::coherent_props;
  ModelSpec model;
  GridSpec grid;
  SweepSpec sweep;
  RhoSpec rho;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "out";

  /// Defaults for the experiment: the chosen fixture, grid and sweep.
  static ExperimentConfig defaults(ExperimentKind kind);

  static ExperimentConfig from_string(const std::string& text);
  static ExperimentConfig from_file(const std::filesystem::path& path);

  /// INI text that parses back to the same configuration.
  std::string to_ini() const;

  Grid build_grid() const;
  ScatterModel build_model(double omega) const;
};

struct Diagnostic {
  std::string field;
  std::string message;
};

/// All precondition violations, without running any propagation.
std::vector<Diagnostic> validate(const ExperimentConfig& config);

}  // namespace adiascat
