#include "chfem/stepper.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace chfem {

namespace {

using Clock = std::chrono::steady_clock;
using Index = Eigen::Index;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// a += s * b for matrices sharing one pattern.
void add_scaled(SparseMatrix& a, double s, const SparseMatrix& b) {
  if (a.nonZeros() == b.nonZeros() &&
      std::equal(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros(), b.innerIndexPtr())) {
    double* av = a.valuePtr();
    const double* bv = b.valuePtr();
    for (Index k = 0; k < a.nonZeros(); ++k) {
      av[k] += s * bv[k];
    }
    return;
  }
  a = a + s * b;
}

bool is_zero_energy(const Energy& e) { return e.name == "zero"; }

}  // namespace

StepperKind parse_stepper_kind(const std::string& name) {
  if (name == "sbdf2") {
    return StepperKind::sbdf2;
  }
  if (name == "bdf2_newton" || name == "newton") {
    return StepperKind::bdf2_newton;
  }
  throw std::invalid_argument("unknown stepper '" + name + "'");
}

std::string to_string(StepperKind k) { return k == StepperKind::sbdf2 ? "sbdf2" : "bdf2_newton"; }

StepperState StepperState::initial(Field u0, double t0, double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("StepperState: dt must be positive");
  }
  Field w(u0.space_ptr());
  StepperState s{std::nullopt, std::move(u0), std::move(w), t0, t0, dt, 0};
  return s;
}

Stepper::Stepper(ProblemModel model, std::shared_ptr<const FeSpace> space, StepperOptions options)
    : model_(std::move(model)),
      space_(std::move(space)),
      options_(options),
      assembler_(space_),
      mass_(assembler_.mass()),
      gamma_stiffness_(model_.gamma * assembler_.stiffness()),
      solver_(options.solver) {
  if (model_.spatial_energy) {
    const ScalarFn rho = model_.spatial_energy;
    spatial_load_ = assembler_.load(PointwiseCoefficient{{}, [rho](std::span<const double>, Point x) { return rho(x); }});
  } else {
    spatial_load_ = Vector::Zero(static_cast<Index>(space_->ndof()));
  }
}

void Stepper::check_state(const StepperState& state) const {
  if (!(state.dt > 0.0)) {
    throw std::invalid_argument("stepper: dt must be positive");
  }
  if (&state.u_prev1.space() != space_.get()) {
    throw std::invalid_argument("stepper: state does not belong to the stepper's space");
  }
  if (!state.u_prev1.all_finite() || (state.u_prev2 && !state.u_prev2->all_finite())) {
    std::ostringstream msg;
    msg << "stepper: non-finite state at step " << state.step_index << ", t = " << state.t;
    throw std::domain_error(msg.str());
  }
}

void Stepper::advance(StepperState& state, Field u, Field w) const {
  state.u_prev2 = std::move(state.u_prev1);
  state.u_prev1 = std::move(u);
  state.w = std::move(w);
  state.step_index += 1;
  state.t = state.t0 + static_cast<double>(state.step_index) * state.dt;
}

BlockSystem Stepper::semi_implicit_system(const StepperState& state, bool second_order) {
  check_state(state);
  if (second_order && !state.u_prev2) {
    throw std::invalid_argument("sbdf2_step: u^{n-2} is required");
  }
  const double dt = state.dt;
  const double tn = state.next_time();
  const double ts = model_.time_scale;
  const Field& u1 = state.u_prev1;
  const Vector& c1 = u1.coeffs();

  BlockSystem sys;
  const auto& f = model_.mobility.f;
  const bool clamp = options_.clamp_mobility;
  PointwiseCoefficient mobility;
  if (second_order) {
    const Field& u2 = *state.u_prev2;
    sys.M1 = (1.5 * ts / dt) * mass_;
    sys.F = (ts / (2.0 * dt)) * (mass_ * (4.0 * c1 - u2.coeffs()));
    mobility.fields = {&u1, &u2};
    mobility.fn = [f, clamp](std::span<const double> v, Point) {
      const double m = 2.0 * f(v[0]) - f(v[1]);
      return clamp ? std::max(m, 0.0) : m;
    };
  } else {
    sys.M1 = (ts / dt) * mass_;
    sys.F = (ts / dt) * (mass_ * c1);
    mobility.fields = {&u1};
    mobility.fn = [f](std::span<const double> v, Point) { return f(v[0]); };
  }
  sys.A1 = assembler_.weighted_stiffness(mobility);

  if (is_zero_energy(model_.energy)) {
    sys.A2 = gamma_stiffness_;
    sys.G = Vector::Zero(c1.size());
  } else if (second_order) {
    auto [jac, b] = assemble_linearized_energy(assembler_, u1, model_.energy.dphi, model_.energy.d2phi);
    add_scaled(jac, 1.0, gamma_stiffness_);
    sys.A2 = std::move(jac);
    sys.G = std::move(b);
  } else {
    sys.A2 = gamma_stiffness_;
    const auto& dphi = model_.energy.dphi;
    sys.G = assembler_.load(PointwiseCoefficient{{&u1}, [dphi](std::span<const double> v, Point) { return dphi(v[0]); }});
  }
  sys.G -= spatial_load_;
  sys.M2 = mass_;
  if (model_.source) {
    sys.F += assembler_.load(model_.source, tn);
  }
  apply_bcs(sys, model_.bc, assembler_, tn, model_.gamma, &mobility);
  return sys;
}

StepReport Stepper::sbdf1_step(StepperState& state) {
  const auto start = Clock::now();
  const BlockSystem sys = semi_implicit_system(state, false);
  BlockSolution sol = solver_.solve(sys);
  StepReport r;
  r.residual = sol.residual;
  advance(state, Field(space_, std::move(sol.U)), Field(space_, std::move(sol.W)));
  r.step_index = state.step_index;
  r.t = state.t;
  r.u = state.u_prev1;
  r.w = state.w;
  r.min_u = r.u.min();
  r.wall_seconds = seconds_since(start);
  return r;
}

StepReport Stepper::sbdf2_step(StepperState& state) {
  const auto start = Clock::now();
  const BlockSystem sys = semi_implicit_system(state, true);
  BlockSolution sol = solver_.solve(sys);
  StepReport r;
  r.residual = sol.residual;
  advance(state, Field(space_, std::move(sol.U)), Field(space_, std::move(sol.W)));
  r.step_index = state.step_index;
  r.t = state.t;
  r.u = state.u_prev1;
  r.w = state.w;
  r.min_u = r.u.min();
  r.wall_seconds = seconds_since(start);
  return r;
}

StepReport Stepper::bdf1_newton_step(StepperState& state) { return newton_step(state, false); }

StepReport Stepper::bdf2_newton_step(StepperState& state) {
  if (!state.u_prev2) {
    throw std::invalid_argument("bdf2_newton_step: u^{n-2} is required");
  }
  return newton_step(state, true);
}

StepReport Stepper::newton_step(StepperState& state, bool second_order) {
  const auto start = Clock::now();
  check_state(state);
  const double dt = state.dt;
  const double tn = state.next_time();
  const double ts = model_.time_scale;
  const Vector& c1 = state.u_prev1.coeffs();
  const double c0 = second_order ? 1.5 : 1.0;

  Vector history = second_order ? Vector((ts / (2.0 * dt)) * (mass_ * (4.0 * c1 - state.u_prev2->coeffs())))
                                : Vector((ts / dt) * (mass_ * c1));
  if (model_.source) {
    history += assembler_.load(model_.source, tn);
  }

  Field u(space_, c1);
  Field w(space_, state.w.coeffs());
  const bool dirichlet = model_.bc.kind == BcKind::dirichlet;
  const auto& bdofs = space_->boundary_dofs();
  if (dirichlet) {
    for (const std::size_t i : bdofs) {
      const Point x = space_->dof_coords()[i];
      u.coeffs()[static_cast<Index>(i)] = model_.bc.u_value(x, tn);
      w.coeffs()[static_cast<Index>(i)] = model_.bc.w_value(x, tn);
    }
  }

  const auto& f = model_.mobility.f;
  const auto& df = model_.mobility.df;
  const auto& dphi = model_.energy.dphi;
  const auto& d2phi = model_.energy.d2phi;
  const PointwiseCoefficient mob{{&u}, [f](std::span<const double> v, Point) { return f(v[0]); }};
  const PointwiseCoefficient dmob{{&u}, [df](std::span<const double> v, Point) { return df(v[0]); }};
  const PointwiseCoefficient d1{{&u}, [dphi](std::span<const double> v, Point) { return dphi(v[0]); }};
  const PointwiseCoefficient d2{{&u}, [d2phi](std::span<const double> v, Point) { return d2phi(v[0]); }};
  const bool zero_energy = is_zero_energy(model_.energy);

  const auto residual = [&](Vector& r1, Vector& r2) {
    r1 = (c0 * ts / dt) * (mass_ * u.coeffs()) - history + assembler_.weighted_stiffness_action(mob, w);
    r2 = mass_ * w.coeffs() - gamma_stiffness_ * u.coeffs() + spatial_load_;
    if (!zero_energy) {
      r2 -= assembler_.load(d1);
    }
    if (model_.bc.kind == BcKind::neumann) {
      auto [fn, gn] = neumann_loads(model_.bc, assembler_, tn, model_.gamma, &mob);
      r1 -= fn;
      r2 -= gn;
    }
    if (dirichlet) {
      for (const std::size_t i : bdofs) {
        r1[static_cast<Index>(i)] = 0.0;
        r2[static_cast<Index>(i)] = 0.0;
      }
    }
    return std::sqrt(r1.squaredNorm() + r2.squaredNorm());
  };

  Vector r1, r2;
  double norm = residual(r1, r2);
  int iterations = 0;
  double linear_residual = 0.0;
  const std::vector<double> zeros(bdofs.size(), 0.0);
  while (!(norm <= options_.newton_tolerance)) {
    if (iterations >= options_.newton_max_iterations || !std::isfinite(norm)) {
      std::ostringstream msg;
      msg << "Newton did not converge at t = " << tn << " after " << iterations << " iterations, residual "
          << norm;
      throw NewtonError(msg.str(), norm, iterations);
    }
    // Boundary mobility derivative of the Neumann flux is not linearized.
    BlockSystem jac;
    jac.M1 = assembler_.gradient_coupling(dmob, w);
    add_scaled(jac.M1, c0 * ts / dt, mass_);
    jac.A1 = assembler_.weighted_stiffness(mob);
    if (zero_energy) {
      jac.A2 = gamma_stiffness_;
    } else {
      jac.A2 = assembler_.weighted_mass(d2);
      add_scaled(jac.A2, 1.0, gamma_stiffness_);
    }
    jac.M2 = mass_;
    jac.F = -r1;
    jac.G = -r2;
    if (dirichlet) {
      apply_dirichlet(jac, bdofs, zeros, zeros);
    }
    const BlockSolution step = solver_.solve(jac);
    linear_residual = step.residual;
    u.coeffs() += step.U;
    w.coeffs() += step.W;
    ++iterations;
    norm = residual(r1, r2);
  }

  StepReport r;
  r.residual = linear_residual;
  r.newton_iterations = iterations;
  r.nonlinear_residual = norm;
  advance(state, std::move(u), std::move(w));
  r.step_index = state.step_index;
  r.t = state.t;
  r.u = state.u_prev1;
  r.w = state.w;
  r.min_u = r.u.min();
  r.wall_seconds = seconds_since(start);
  return r;
}

StepReport Stepper::step(StepperState& state, StepperKind kind) {
  const bool startup = !state.u_prev2.has_value();
  if (kind == StepperKind::sbdf2) {
    return startup ? sbdf1_step(state) : sbdf2_step(state);
  }
  return startup ? bdf1_newton_step(state) : bdf2_newton_step(state);
}

std::size_t steps_for(double t_start, double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end >= t_start)) {
    throw std::invalid_argument("steps_for: need dt > 0 and t_end >= t_start");
  }
  const double n = (t_end - t_start) / dt;
  const double rounded = std::round(n);
  if (std::abs(n - rounded) > 1e-9 * std::max(1.0, n)) {
    std::ostringstream msg;
    msg << "steps_for: span " << (t_end - t_start) << " is not a multiple of dt = " << dt;
    throw std::invalid_argument(msg.str());
  }
  return static_cast<std::size_t>(rounded);
}

Trajectory run(const ProblemModel& model, const Field& u0, const RunOptions& options,
               const std::vector<StepObserver>& observers) {
  const auto start = Clock::now();
  Stepper stepper(model, u0.space_ptr(), options.stepper);
  StepperState state = StepperState::initial(u0, options.t_start, options.dt);

  StepReport initial;
  initial.step_index = 0;
  initial.t = options.t_start;
  initial.u = u0;
  initial.w = state.w;
  initial.min_u = u0.min();
  for (const auto& obs : observers) {
    obs(initial);
  }

  Trajectory traj;
  traj.steps.reserve(options.num_steps);
  for (std::size_t n = 0; n < options.num_steps; ++n) {
    const StepReport r = stepper.step(state, options.kind);
    traj.steps.push_back({r.step_index, r.t, r.residual, r.newton_iterations, r.wall_seconds, r.min_u});
    for (const auto& obs : observers) {
      obs(r);
    }
  }
  traj.u = state.u_prev1;
  traj.w = state.w;
  traj.t = state.t;
  traj.wall_seconds = seconds_since(start);
  return traj;
}

}  // namespace chfem
