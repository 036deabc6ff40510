#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "chfem/diagnostics.hpp"
#include "chfem/io.hpp"
#include "chfem/stepper.hpp"

namespace chfem {

/// Fully resolved run description. Every field has a value once a preset is
/// applied; to_text() and parse_config_text() round-trip losslessly.
struct ScenarioConfig {
  std::string scenario = "lubrication";

  // [mesh]
  long nx = 70;
  long ny = 140;
  int degree = 1;
  Rect domain{-0.5, 0.5, -1.0, 1.0};

  // [time]
  double dt = 1e-5;
  /// Absolute final time; the start time is t0 for selfsimilar, else 0.
  double t_end = 1e-3;
  StepperKind stepper = StepperKind::sbdf2;

  // [solver]
  SolverMethod solver = SolverMethod::direct_lu;
  bool clamp_mobility = false;
  double newton_tolerance = 1e-6;
  int newton_max_iterations = 25;

  // [model]
  BcKind bc = BcKind::noflux;
  double gamma = 1.0;
  double alpha = 2.0;
  double L = 3.0;
  double t0 = 0.001;
  double eps = 0.03;
  double lambda = 0.75;
  double delta = 0.01;
  double sigma = 80.0;
  double C = 2.0;
  double mean = 0.0;
  std::uint64_t seed = 20240601;
  /// Regularization of the degenerate mobility, u^5/(xi u + u^4); 0 = off.
  double xi = 0.0;

  // [output]
  std::filesystem::path out_dir = "out";
  /// Snapshot every k steps (step 0 is always written); 0 = initial only.
  std::size_t snapshot_every = 0;
  SnapshotFormat snapshot_format = SnapshotFormat::vtk_legacy;
  ErrorReference error_reference = ErrorReference::interpolant;

  double t_start() const { return scenario == "selfsimilar" ? t0 : 0.0; }
  std::size_t num_steps() const { return steps_for(t_start(), t_end, dt); }
};

std::vector<std::string> scenario_names();

/// Defaults of a named scenario. Throws std::invalid_argument for unknown
/// names.
ScenarioConfig preset(const std::string& scenario);

/// Flat key/value pairs; keys are bare names ("nx", "dt", ...).
using ConfigValues = std::map<std::string, std::string>;

/// Parses `key = value` lines with optional `[section]` headers; '#' starts
/// a comment. A key under a header must belong to that section. Throws
/// std::invalid_argument with the line number on malformed input.
ConfigValues parse_config_text(const std::string& text);
ConfigValues read_config_file(const std::filesystem::path& path);

/// Preset of values["scenario"] (default lubrication) with every other
/// value applied on top. Throws std::invalid_argument on unknown keys,
/// unparsable or non-finite numbers and invalid combinations.
ScenarioConfig resolve_config(const ConfigValues& values);

/// Applies overrides to an already resolved config.
ScenarioConfig apply_overrides(ScenarioConfig base, const ConfigValues& overrides);

/// Checks ranges and scenario requirements; throws std::invalid_argument.
void validate(const ScenarioConfig& c);

/// Every key with its resolved value, grouped by section.
std::string to_text(const ScenarioConfig& c);

}  // namespace chfem
