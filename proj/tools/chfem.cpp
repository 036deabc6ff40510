// Command line driver: chfem <run|spatial-study|temporal-study|compare-steppers> [options]

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "chfem/harness.hpp"

namespace {

using namespace chfem;

struct CommonFlags {
  std::string config_file;
  std::optional<std::string> scenario, bc, stepper, solver, out, snapshot_format, error_reference;
  std::optional<long> nx, ny;
  std::optional<int> degree;
  std::optional<double> dt, t_end;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> snapshot_every;
  std::vector<std::string> set;

  void attach(CLI::App& app) {
    app.add_option("--config", config_file, "key = value config file")->check(CLI::ExistingFile);
    app.add_option("--scenario", scenario, "scenario preset");
    app.add_option("--nx", nx, "cells in x");
    app.add_option("--ny", ny, "cells in y");
    app.add_option("--degree", degree, "Lagrange degree (1 or 2)");
    app.add_option("--dt", dt, "time step");
    app.add_option("--t-end", t_end, "final time");
    app.add_option("--bc", bc, "noflux | dirichlet | neumann");
    app.add_option("--stepper", stepper, "sbdf2 | bdf2_newton");
    app.add_option("--solver", solver, "direct_lu | gmres_ilu");
    app.add_option("--seed", seed, "spinodal seed");
    app.add_option("--out", out, "output directory");
    app.add_option("--snapshot-every", snapshot_every, "snapshot cadence in steps (0 = initial only)");
    app.add_option("--snapshot-format", snapshot_format, "vtk | csv");
    app.add_option("--error-reference", error_reference, "exact | interpolant");
    app.add_option("--set", set, "extra key=value override (repeatable)");
  }

  ScenarioConfig resolve() const {
    ConfigValues values;
    if (!config_file.empty()) {
      values = read_config_file(config_file);
    }
    const auto put = [&values](const char* key, const auto& v) {
      if (v) {
        if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, std::string>) {
          values[key] = *v;
        } else if constexpr (std::is_floating_point_v<std::decay_t<decltype(*v)>>) {
          values[key] = format_real(*v);
        } else {
          values[key] = std::to_string(*v);
        }
      }
    };
    put("scenario", scenario);
    put("nx", nx);
    put("ny", ny);
    put("degree", degree);
    put("dt", dt);
    put("t_end", t_end);
    put("bc", bc);
    put("stepper", stepper);
    put("solver", solver);
    put("seed", seed);
    put("out_dir", out);
    put("snapshot_every", snapshot_every);
    put("snapshot_format", snapshot_format);
    put("error_reference", error_reference);
    for (const auto& kv : set) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
      }
      values[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    return resolve_config(values);
  }
};

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (const auto& x : v) {
    s += (s.empty() ? "" : " ") + std::to_string(x);
  }
  return s;
}

void print_table(const char* label, const ConvergenceTable& t) {
  std::printf("  %s\n", label);
  for (const auto& r : t.rows) {
    if (r.order) {
      std::printf("    %-12.5g %-14.6e order %.3f\n", r.size, r.error, *r.order);
    } else {
      std::printf("    %-12.5g %-14.6e order ---\n", r.size, r.error);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed finite element solver for fourth-order phase-field and thin-film equations"};
  app.require_subcommand(1);

  CommonFlags run_flags, spatial_flags, temporal_flags, compare_flags;

  auto* run_cmd = app.add_subcommand("run", "run one scenario and write artifacts");
  run_flags.attach(*run_cmd);
  bool echo_only = false;
  run_cmd->add_flag("--echo-config", echo_only, "print the resolved config and exit");

  auto* spatial_cmd = app.add_subcommand("spatial-study", "mesh refinement study against the exact solution");
  spatial_flags.attach(*spatial_cmd);
  std::vector<long> meshes{25, 50, 100};
  std::vector<int> degrees{1, 2};
  std::vector<std::string> bcs{"dirichlet", "neumann"};
  spatial_cmd->add_option("--meshes", meshes, "n for n x n meshes");
  spatial_cmd->add_option("--degrees", degrees, "element degrees");
  spatial_cmd->add_option("--bcs", bcs, "boundary conditions");

  auto* temporal_cmd = app.add_subcommand("temporal-study", "time step refinement study against a reference run");
  temporal_flags.attach(*temporal_cmd);
  std::vector<double> dts{0.008, 0.004, 0.002, 0.001};
  std::optional<double> dt_ref;
  temporal_cmd->add_option("--dts", dts, "time steps, coarse to fine");
  temporal_cmd->add_option("--dt-ref", dt_ref, "reference time step (default min/64)");

  auto* compare_cmd = app.add_subcommand("compare-steppers", "linear scheme vs fully implicit Newton baseline");
  compare_flags.attach(*compare_cmd);
  std::vector<double> final_times{0.006, 0.012, 0.018};
  compare_cmd->add_option("--final-times", final_times, "report times");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const ScenarioConfig cfg = run_flags.resolve();
      std::cout << to_text(cfg);
      if (echo_only) {
        return 0;
      }
      const RunArtifacts art = run_scenario(cfg);
      std::printf("\nsteps %zu  t_final %.10g  min_u %.6e  wall %.2f s\nartifacts in %s\n", art.steps, art.t_final,
                  art.min_u, art.wall_seconds, art.out_dir.string().c_str());
    } else if (spatial_cmd->parsed()) {
      ScenarioConfig cfg = spatial_flags.resolve();
      std::vector<BcKind> kinds;
      for (const auto& b : bcs) {
        kinds.push_back(parse_bc_kind(b));
      }
      std::printf("spatial study: %s, meshes %s, degrees %s\n", cfg.scenario.c_str(), join(meshes).c_str(),
                  join(degrees).c_str());
      for (const auto& t : spatial_convergence_study(cfg, meshes, degrees, kinds)) {
        std::printf("P%d %s field %s\n", t.degree, to_string(t.bc).c_str(), t.field.c_str());
        print_table("L2", t.l2);
        print_table("H1", t.h1);
      }
      std::printf("wrote %s\n", (cfg.out_dir / "errors_spatial.csv").string().c_str());
    } else if (temporal_cmd->parsed()) {
      const ScenarioConfig cfg = temporal_flags.resolve();
      const TemporalStudy st = temporal_convergence_study(cfg, dts, dt_ref);
      std::printf("temporal study: %s, reference dt %.6g (%.1f s)\n", cfg.scenario.c_str(), st.dt_ref,
                  st.ref_seconds);
      print_table("relative L2 error on u", st.u);
      print_table("relative L2 error on w", st.w);
      std::printf("wrote %s\n", (cfg.out_dir / "errors_temporal.csv").string().c_str());
    } else if (compare_cmd->parsed()) {
      const ScenarioConfig cfg = compare_flags.resolve();
      std::printf("%-10s %-12s %-12s %-9s %-14s %s\n", "t_final", "sbdf2 [s]", "newton [s]", "speedup", "rel. L2 diff",
                  "status");
      for (const auto& r : compare_steppers(cfg, final_times)) {
        std::printf("%-10.4g %-12.4f %-12.4f %-9.3f %-14.4e %s\n", r.t_final, r.sbdf2_seconds, r.newton_seconds,
                    r.speedup, r.relative_l2_difference, r.status.c_str());
      }
      std::printf("wrote %s\n", (cfg.out_dir / "stepper_comparison.csv").string().c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "chfem: %s\n", e.what());
    return 1;
  }
  return 0;
}
