#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chfem/assembly.hpp"
#include "chfem/linsolve.hpp"
#include "chfem/models.hpp"

namespace chfem {

enum class StepperKind { sbdf2, bdf2_newton };

StepperKind parse_stepper_kind(const std::string& name);
std::string to_string(StepperKind k);

/// Two-level history (u^{n-2}, u^{n-1}) plus the latest chemical potential.
/// After a startup step only u_prev1 is populated.
struct StepperState {
  std::optional<Field> u_prev2;
  Field u_prev1;
  Field w;
  double t0 = 0.0;
  double t = 0.0;
  double dt = 0.0;
  std::size_t step_index = 0;

  /// Time after the next step, t0 + (step_index + 1) dt.
  double next_time() const { return t0 + static_cast<double>(step_index + 1) * dt; }

  /// State before the first step: u_prev1 = u0, w = 0.
  static StepperState initial(Field u0, double t0, double dt);
};

struct StepReport {
  std::size_t step_index = 0;
  double t = 0.0;
  Field u;
  Field w;
  /// Two-norm of the final linear residual.
  double residual = 0.0;
  /// Linear solves of the Newton loop; 0 for the linear scheme.
  int newton_iterations = 0;
  /// Final nonlinear residual (Newton only).
  double nonlinear_residual = 0.0;
  double wall_seconds = 0.0;
  double min_u = 0.0;
};

struct StepperOptions {
  SolverOptions solver;
  /// Floor the extrapolated mobility at zero.
  bool clamp_mobility = false;
  double newton_tolerance = 1e-6;
  int newton_max_iterations = 25;
};

class NewtonError : public std::runtime_error {
 public:
  NewtonError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// Time integrator for one model on one space. Mass and stiffness matrices
/// are cached; coefficient-dependent blocks are reassembled every step.
class Stepper {
 public:
  Stepper(ProblemModel model, std::shared_ptr<const FeSpace> space, StepperOptions options = {});

  const ProblemModel& model() const { return model_; }
  const Assembler& assembler() const { return assembler_; }
  const SparseMatrix& mass() const { return mass_; }
  const StepperOptions& options() const { return options_; }

  /// Semi-implicit backward Euler with mobility f(u^{n-1}) and explicit
  /// energy load phi'(u^{n-1}). Advances the state by dt.
  StepReport sbdf1_step(StepperState& state);
  /// Linear second-order step: BDF2 in time, extrapolated mobility
  /// 2 f(u^{n-1}) - f(u^{n-2}), Taylor-linearized phi' about u^{n-1}.
  StepReport sbdf2_step(StepperState& state);
  /// Fully implicit backward Euler solved by Newton (startup of the baseline).
  StepReport bdf1_newton_step(StepperState& state);
  /// Fully implicit BDF2 solved by Newton.
  StepReport bdf2_newton_step(StepperState& state);

  /// Startup step when no u^{n-2} exists, otherwise the main step of `kind`.
  StepReport step(StepperState& state, StepperKind kind);

  /// The block system of the semi-implicit step from the current state, with
  /// boundary conditions applied. Exposed for verification.
  BlockSystem semi_implicit_system(const StepperState& state, bool second_order);

 private:
  StepReport newton_step(StepperState& state, bool second_order);
  void check_state(const StepperState& state) const;
  void advance(StepperState& state, Field u, Field w) const;

  ProblemModel model_;
  std::shared_ptr<const FeSpace> space_;
  StepperOptions options_;
  Assembler assembler_;
  SparseMatrix mass_;
  SparseMatrix gamma_stiffness_;
  Vector spatial_load_;
  BlockSolver solver_;
};

/// Per-step scalars retained by run(); full fields go to observers.
struct StepSummary {
  std::size_t step_index = 0;
  double t = 0.0;
  double residual = 0.0;
  int newton_iterations = 0;
  double wall_seconds = 0.0;
  double min_u = 0.0;
};

struct RunOptions {
  double dt = 1e-3;
  double t_start = 0.0;
  std::size_t num_steps = 0;
  StepperKind kind = StepperKind::sbdf2;
  StepperOptions stepper;
};

struct Trajectory {
  std::vector<StepSummary> steps;
  Field u;
  Field w;
  double t = 0.0;
  double wall_seconds = 0.0;
};

/// Called with the initial state (step 0, w = 0) and after every step.
using StepObserver = std::function<void(const StepReport&)>;

/// Steps from t_start: step 1 is the startup step, steps 2..N the main
/// scheme, so u^k approximates u(t_start + k dt).
Trajectory run(const ProblemModel& model, const Field& u0, const RunOptions& options,
               const std::vector<StepObserver>& observers = {});

/// Number of steps dt needed to cover [t_start, t_end]; throws if the span is
/// not an integer multiple of dt (relative tolerance 1e-9).
std::size_t steps_for(double t_start, double t_end, double dt);

}  // namespace chfem
