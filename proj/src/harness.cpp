#include "chfem/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "chfem/io.hpp"

namespace chfem {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string nan_or(const std::optional<double>& v) {
  return v ? format_real(*v) : std::string("nan");
}

std::filesystem::path snapshot_path(const std::filesystem::path& dir, std::size_t step, SnapshotFormat f) {
  char name[64];
  std::snprintf(name, sizeof name, "snapshot_%06zu.%s", step, f == SnapshotFormat::vtk_legacy ? "vtk" : "csv");
  return dir / name;
}

Point height_probe(const Rect& r) {
  const Point origin{0.0, 0.0};
  return r.contains(origin, 1e-12) ? origin : Point{0.5 * (r.xmin + r.xmax), 0.5 * (r.ymin + r.ymax)};
}

// Orders of consecutive pairs; a pair with a zero or non-finite error gets
// no order instead of failing the whole study.
ConvergenceTable orders_where_defined(const std::vector<ConvergenceRow>& rows, double tau) {
  ConvergenceTable t{tau, rows};
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    t.rows[i].order.reset();
    const double a = rows[i].error;
    const double b = rows[i + 1].error;
    if (a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b)) {
      t.rows[i].order = observed_order({rows[i], rows[i + 1]}, tau).rows[0].order;
    }
  }
  if (!rows.empty()) {
    t.rows.back().order.reset();
  }
  return t;
}

// Ratio of consecutive sizes; throws unless it is constant.
double constant_ratio(const std::vector<double>& sizes, const char* what) {
  if (sizes.size() < 2) {
    throw std::invalid_argument(std::string(what) + ": at least two levels are required");
  }
  const double tau = sizes[0] / sizes[1];
  for (std::size_t i = 1; i + 1 < sizes.size(); ++i) {
    const double r = sizes[i] / sizes[i + 1];
    if (std::abs(r - tau) > 1e-9 * tau) {
      throw std::invalid_argument(std::string(what) + ": levels must refine by a constant factor");
    }
  }
  return tau;
}

}  // namespace

Scenario build_scenario(const ScenarioConfig& config) {
  validate(config);
  Scenario s;
  s.config = config;
  s.t_start = config.t_start();
  auto mesh = std::make_shared<const Mesh>(config.domain, config.nx, config.ny);
  s.space = build_space(mesh, config.degree);
  const std::string& name = config.scenario;

  if (name == "manufactured") {
    ManufacturedCase c;
    c.alpha = config.alpha;
    c.gamma = config.gamma;
    s.model = manufactured_model(c, config.bc);
  } else if (name == "selfsimilar") {
    SelfSimilarCase c;
    c.L = config.L;
    c.t0 = config.t0;
    s.model = selfsimilar_model(c, config.bc);
  } else if (name == "lubrication") {
    s.model = config.xi > 0.0 ? regularized_lubrication_model(config.xi) : lubrication_model();
    LubricationCase c;
    c.delta = config.delta;
    c.sigma = config.sigma;
    c.C = config.C;
    s.u0 = interpolate(s.space, lubrication_initial(c));
  } else if (name == "spinodal" || name == "ostwald") {
    s.model = spinodal_model(config.eps);
    SpinodalCase c;
    c.eps = config.eps;
    c.mean = config.mean;
    c.seed = config.seed;
    c.domain = config.domain;
    const SpinodalInitial init(c);
    s.u0 = interpolate(s.space, [&init](Point x) { return init(x); });
  } else {
    ElectrowettingCase c = name == "electrowetting_split" ? electrowetting_split_case(config.lambda)
                                                          : electrowetting_translate_case(config.lambda);
    c.eps = config.eps;
    s.model = electrowetting_model(c);
    s.u0 = interpolate(s.space, electrowetting_initial(c));
  }
  if (s.model.exact) {
    const SpaceTimeFn u = s.model.exact->u;
    const double t = s.t_start;
    s.u0 = interpolate(s.space, [u, t](Point x) { return u(x, t); });
  }
  return s;
}

RunOptions run_options(const ScenarioConfig& config) {
  RunOptions o;
  o.dt = config.dt;
  o.t_start = config.t_start();
  o.num_steps = config.num_steps();
  o.kind = config.stepper;
  o.stepper.solver.method = config.solver;
  o.stepper.clamp_mobility = config.clamp_mobility;
  o.stepper.newton_tolerance = config.newton_tolerance;
  o.stepper.newton_max_iterations = config.newton_max_iterations;
  return o;
}

RunArtifacts run_scenario(const ScenarioConfig& config) {
  const auto start = Clock::now();
  const Scenario s = build_scenario(config);
  const RunOptions opts = run_options(config);

  RunArtifacts art;
  art.out_dir = config.out_dir;
  std::filesystem::create_directories(art.out_dir);
  art.energy_csv = art.out_dir / "energy.csv";
  art.mass_csv = art.out_dir / "mass.csv";
  art.height_csv = art.out_dir / "height.csv";
  art.steps_csv = art.out_dir / "steps.csv";
  art.metadata = art.out_dir / "metadata.txt";

  CsvWriter energy(art.energy_csv, {"t", "J"});
  CsvWriter mass(art.mass_csv, {"t", "mass"});
  CsvWriter height(art.height_csv, {"t", "u00"});
  CsvWriter steps(art.steps_csv, {"step", "t", "min_u", "residual", "newton_iterations", "wall_seconds"});
  const Point probe = height_probe(config.domain);
  double solver_seconds = 0.0;
  art.min_u = s.u0.min();

  const StepObserver record = [&](const StepReport& r) {
    energy.row(std::vector<double>{r.t, discrete_energy(r.u, s.model)});
    mass.row(std::vector<double>{r.t, total_mass(r.u)});
    height.row(std::vector<double>{r.t, droplet_height(r.u, probe)});
    steps.row(std::vector<std::string>{std::to_string(r.step_index), format_real(r.t), format_real(r.min_u),
                                       format_real(r.residual), std::to_string(r.newton_iterations),
                                       format_real(r.wall_seconds)});
    solver_seconds += r.wall_seconds;
    art.min_u = std::min(art.min_u, r.min_u);
    art.steps = r.step_index;
    art.t_final = r.t;
    const bool snap = r.step_index == 0 || (config.snapshot_every > 0 && r.step_index % config.snapshot_every == 0);
    if (snap) {
      const auto path = snapshot_path(art.out_dir, r.step_index, config.snapshot_format);
      write_snapshot(path, r.u, r.step_index > 0 ? &r.w : nullptr, config.snapshot_format, config.scenario);
      art.snapshots.push_back(path);
    }
  };

  const auto write_metadata = [&](const std::string& status) {
    std::ofstream meta(art.metadata);
    if (!meta) {
      throw std::runtime_error("cannot write " + art.metadata.string());
    }
    meta << "# chfem run\n";
    meta << "status = " << status << '\n';
    meta << "partial = " << (status == "ok" ? "false" : "true") << '\n';
    meta << "t_start = " << format_real(s.t_start) << '\n';
    meta << "t_final = " << format_real(art.t_final) << '\n';
    meta << "steps_completed = " << art.steps << '\n';
    meta << "steps_requested = " << opts.num_steps << '\n';
    meta << "ndof = " << s.space->ndof() << '\n';
    meta << "min_u = " << format_real(art.min_u) << '\n';
    meta << "solver_seconds = " << format_real(solver_seconds) << '\n';
    meta << "wall_seconds = " << format_real(seconds_since(start)) << '\n';
    meta << "snapshots = " << art.snapshots.size() << "\n\n";
    meta << "# resolved configuration\n" << to_text(config);
  };

  try {
    run(s.model, s.u0, opts, {record});
  } catch (const std::exception& e) {
    energy.flush();
    mass.flush();
    height.flush();
    steps.flush();
    write_metadata(std::string("failed: ") + e.what());
    throw;
  }
  energy.flush();
  mass.flush();
  height.flush();
  steps.flush();
  art.wall_seconds = seconds_since(start);
  write_metadata("ok");
  return art;
}

std::vector<SpatialStudyTable> spatial_convergence_study(const ScenarioConfig& base, const std::vector<long>& meshes,
                                                         const std::vector<int>& degrees,
                                                         const std::vector<BcKind>& bcs, bool write_csv) {
  if (meshes.size() < 2) {
    throw std::invalid_argument("spatial_convergence_study: at least two meshes are required");
  }
  std::vector<SpatialStudyTable> tables;
  for (const int degree : degrees) {
    for (const BcKind bc : bcs) {
      std::vector<double> sizes;
      std::vector<ConvergenceRow> l2[2], h1[2];
      std::vector<double> cpu;
      for (const long n : meshes) {
        ScenarioConfig cfg = base;
        cfg.nx = cfg.ny = n;
        cfg.degree = degree;
        cfg.bc = bc;
        const auto start = Clock::now();
        const Scenario s = build_scenario(cfg);
        if (!s.model.exact) {
          throw std::invalid_argument("spatial_convergence_study: scenario " + cfg.scenario +
                                      " has no exact solution");
        }
        const Trajectory tr = run(s.model, s.u0, run_options(cfg));
        cpu.push_back(seconds_since(start));
        const double h = s.space->mesh().h();
        sizes.push_back(h);
        const ExactSolution& ex = *s.model.exact;
        ErrorOptions opt;
        opt.value_reference = cfg.error_reference;
        opt.field = "u";
        const ErrorReport eu = error_norms(tr.u, ex.u, ex.grad_u, tr.t, opt);
        opt.field = "w";
        const ErrorReport ew = error_norms(tr.w, ex.w, ex.grad_w, tr.t, opt);
        l2[0].push_back({h, eu.l2, std::nullopt});
        h1[0].push_back({h, eu.h1, std::nullopt});
        l2[1].push_back({h, ew.l2, std::nullopt});
        h1[1].push_back({h, ew.h1, std::nullopt});
      }
      const double tau = constant_ratio(sizes, "spatial_convergence_study");
      for (int f = 0; f < 2; ++f) {
        SpatialStudyTable t;
        t.degree = degree;
        t.bc = bc;
        t.field = f == 0 ? "u" : "w";
        t.meshes = meshes;
        t.l2 = orders_where_defined(l2[f], tau);
        t.h1 = orders_where_defined(h1[f], tau);
        t.cpu_seconds = cpu;
        tables.push_back(std::move(t));
      }
    }
  }
  if (write_csv) {
    std::filesystem::create_directories(base.out_dir);
    CsvWriter csv(base.out_dir / "errors_spatial.csv",
                  {"degree", "bc", "field", "n", "h", "l2", "l2_order", "h1", "h1_order", "cpu_seconds"});
    for (const auto& t : tables) {
      for (std::size_t i = 0; i < t.meshes.size(); ++i) {
        csv.row(std::vector<std::string>{std::to_string(t.degree), to_string(t.bc), t.field,
                                         std::to_string(t.meshes[i]), format_real(t.l2.rows[i].size),
                                         format_real(t.l2.rows[i].error), nan_or(t.l2.rows[i].order),
                                         format_real(t.h1.rows[i].error), nan_or(t.h1.rows[i].order),
                                         format_real(t.cpu_seconds[i])});
      }
    }
    csv.flush();
  }
  return tables;
}

double default_reference_dt(const std::vector<double>& dts) {
  if (dts.empty()) {
    throw std::invalid_argument("default_reference_dt: empty step list");
  }
  return *std::min_element(dts.begin(), dts.end()) / 64.0;
}

TemporalStudy temporal_convergence_study(const ScenarioConfig& base, const std::vector<double>& dts,
                                         std::optional<double> dt_ref, bool write_csv) {
  const double tau = constant_ratio(dts, "temporal_convergence_study");
  if (!(tau > 1.0)) {
    throw std::invalid_argument("temporal_convergence_study: steps must be ordered coarse to fine");
  }
  TemporalStudy study;
  study.dt_ref = dt_ref.value_or(default_reference_dt(dts));
  if (!(study.dt_ref > 0.0) || study.dt_ref > dts.back()) {
    throw std::invalid_argument("temporal_convergence_study: reference dt must be positive and <= the finest dt");
  }

  ScenarioConfig cfg = base;
  cfg.dt = study.dt_ref;
  const Scenario s = build_scenario(cfg);
  const auto solve = [&](double dt) {
    ScenarioConfig c = base;
    c.dt = dt;
    validate(c);
    return run(s.model, s.u0, run_options(c));
  };

  auto start = Clock::now();
  const Trajectory ref = solve(study.dt_ref);
  study.ref_seconds = seconds_since(start);
  const double ref_norm = l2_norm(ref.u);
  if (!(ref_norm > 0.0)) {
    throw std::domain_error("temporal_convergence_study: reference solution has zero norm");
  }

  std::vector<ConvergenceRow> ru, rw;
  for (const double dt : dts) {
    start = Clock::now();
    const Trajectory tr = solve(dt);
    study.cpu_seconds.push_back(seconds_since(start));
    ru.push_back({dt, l2_distance(ref.u, tr.u) / ref_norm, std::nullopt});
    rw.push_back({dt, l2_distance(ref.w, tr.w) / ref_norm, std::nullopt});
  }
  study.u = orders_where_defined(ru, tau);
  study.w = orders_where_defined(rw, tau);

  if (write_csv) {
    std::filesystem::create_directories(base.out_dir);
    CsvWriter csv(base.out_dir / "errors_temporal.csv",
                  {"dt", "u_error", "u_order", "w_error", "w_order", "cpu_seconds"});
    for (std::size_t i = 0; i < dts.size(); ++i) {
      csv.row(std::vector<std::string>{format_real(dts[i]), format_real(study.u.rows[i].error),
                                       nan_or(study.u.rows[i].order), format_real(study.w.rows[i].error),
                                       nan_or(study.w.rows[i].order), format_real(study.cpu_seconds[i])});
    }
    csv.flush();
  }
  return study;
}

std::vector<StepperComparisonRow> compare_steppers(const ScenarioConfig& config, const std::vector<double>& final_times,
                                                   bool write_csv) {
  std::vector<StepperComparisonRow> rows;
  if (!final_times.empty()) {
    const Scenario s = build_scenario(config);
    std::vector<double> times = final_times;
    std::sort(times.begin(), times.end());
    std::vector<std::size_t> targets;
    for (const double t : times) {
      targets.push_back(steps_for(s.t_start, t, config.dt));
    }

    struct Capture {
      std::map<std::size_t, Field> u;
      std::map<std::size_t, double> seconds;
      std::size_t completed = 0;
      std::string error;
    };
    const auto integrate = [&](StepperKind kind) {
      Capture cap;
      RunOptions opts = run_options(config);
      Stepper stepper(s.model, s.space, opts.stepper);
      StepperState state = StepperState::initial(s.u0, s.t_start, config.dt);
      double elapsed = 0.0;
      const auto keep = [&](std::size_t k, const Field& u) {
        if (std::find(targets.begin(), targets.end(), k) != targets.end()) {
          cap.u[k] = u;
          cap.seconds[k] = elapsed;
        }
      };
      keep(0, s.u0);
      try {
        while (state.step_index < targets.back()) {
          const StepReport r = stepper.step(state, kind);
          elapsed += r.wall_seconds;
          cap.completed = r.step_index;
          keep(r.step_index, r.u);
        }
      } catch (const NewtonError& e) {
        cap.error = e.what();
      } catch (const SolverError& e) {
        cap.error = e.what();
      }
      return cap;
    };

    const Capture lin = integrate(StepperKind::sbdf2);
    if (!lin.error.empty()) {
      throw std::runtime_error("compare_steppers: linear scheme failed: " + lin.error);
    }
    const Capture newton = integrate(StepperKind::bdf2_newton);
    for (std::size_t i = 0; i < times.size(); ++i) {
      StepperComparisonRow row;
      row.t_final = times[i];
      const std::size_t k = targets[i];
      row.sbdf2_seconds = lin.seconds.at(k);
      if (newton.u.count(k)) {
        row.newton_seconds = newton.seconds.at(k);
        row.speedup = row.sbdf2_seconds > 0.0 ? row.newton_seconds / row.sbdf2_seconds : 0.0;
        const double norm = l2_norm(newton.u.at(k));
        row.relative_l2_difference = l2_distance(lin.u.at(k), newton.u.at(k)) / norm;
      } else {
        row.newton_ok = false;
        row.newton_seconds = std::numeric_limits<double>::quiet_NaN();
        row.speedup = std::numeric_limits<double>::quiet_NaN();
        row.relative_l2_difference = std::numeric_limits<double>::quiet_NaN();
        row.status = "newton failed: " + newton.error;
      }
      rows.push_back(row);
    }
  }

  if (write_csv) {
    std::filesystem::create_directories(config.out_dir);
    CsvWriter csv(config.out_dir / "stepper_comparison.csv",
                  {"t_final", "sbdf2_seconds", "newton_seconds", "speedup", "relative_l2_difference", "status"});
    for (const auto& r : rows) {
      std::string status = r.status;
      std::replace(status.begin(), status.end(), ',', ';');
      csv.row(std::vector<std::string>{format_real(r.t_final), format_real(r.sbdf2_seconds),
                                       format_real(r.newton_seconds), format_real(r.speedup),
                                       format_real(r.relative_l2_difference), status});
    }
    csv.flush();
  }
  return rows;
}

}  // namespace chfem
