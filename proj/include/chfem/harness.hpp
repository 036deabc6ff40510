#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chfem/config.hpp"
#include "chfem/diagnostics.hpp"
#include "chfem/stepper.hpp"

namespace chfem {

/// Everything needed to start time stepping.
struct Scenario {
  ScenarioConfig config;
  ProblemModel model;
  std::shared_ptr<const FeSpace> space;
  Field u0;
  double t_start = 0.0;
};

Scenario build_scenario(const ScenarioConfig& config);

RunOptions run_options(const ScenarioConfig& config);

struct RunArtifacts {
  std::filesystem::path out_dir;
  std::filesystem::path energy_csv;
  std::filesystem::path mass_csv;
  std::filesystem::path height_csv;
  /// step, t, min_u, residual, newton_iterations, wall_seconds.
  std::filesystem::path steps_csv;
  std::filesystem::path metadata;
  std::vector<std::filesystem::path> snapshots;
  std::size_t steps = 0;
  double t_final = 0.0;
  double wall_seconds = 0.0;
  double min_u = 0.0;
};

/// Runs the configured scenario and writes time series, snapshots and a
/// metadata file with the resolved config. On failure the metadata records
/// the partial state and the error is rethrown.
RunArtifacts run_scenario(const ScenarioConfig& config);

struct SpatialStudyTable {
  int degree = 1;
  BcKind bc = BcKind::dirichlet;
  /// "u" or "w".
  std::string field;
  std::vector<long> meshes;
  ConvergenceTable l2;
  ConvergenceTable h1;
  std::vector<double> cpu_seconds;
};

/// Errors at t_end on n x n meshes for each (degree, bc); results for u and
/// w. Meshes must refine by a constant factor. Writes errors_spatial.csv to
/// base.out_dir when write_csv is set.
std::vector<SpatialStudyTable> spatial_convergence_study(const ScenarioConfig& base, const std::vector<long>& meshes,
                                                         const std::vector<int>& degrees,
                                                         const std::vector<BcKind>& bcs, bool write_csv = true);

struct TemporalStudy {
  double dt_ref = 0.0;
  double ref_seconds = 0.0;
  /// Relative errors ||u_ref - u|| / ||u_ref|| and ||w_ref - w|| / ||u_ref||.
  ConvergenceTable u;
  ConvergenceTable w;
  std::vector<double> cpu_seconds;
};

/// Reference dt when none is given: min(dts) / 64.
double default_reference_dt(const std::vector<double>& dts);

/// dts ordered coarse to fine with a constant ratio. Writes
/// errors_temporal.csv to base.out_dir when write_csv is set.
TemporalStudy temporal_convergence_study(const ScenarioConfig& base, const std::vector<double>& dts,
                                         std::optional<double> dt_ref = std::nullopt, bool write_csv = true);

struct StepperComparisonRow {
  double t_final = 0.0;
  double sbdf2_seconds = 0.0;
  double newton_seconds = 0.0;
  /// newton_seconds / sbdf2_seconds.
  double speedup = 0.0;
  /// ||u_sbdf2 - u_newton|| / ||u_newton||.
  double relative_l2_difference = 0.0;
  bool newton_ok = true;
  std::string status = "ok";
};

/// Runs both steppers from the config's initial state to max(final_times)
/// and reports cumulative solver time and the difference at each requested
/// time. A Newton failure marks that row and the later ones instead of
/// aborting. Writes stepper_comparison.csv when write_csv is set.
std::vector<StepperComparisonRow> compare_steppers(const ScenarioConfig& config, const std::vector<double>& final_times,
                                                   bool write_csv = true);

}  // namespace chfem
