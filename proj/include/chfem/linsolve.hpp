#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "chfem/assembly.hpp"

namespace chfem {

enum class SolverMethod { direct_lu, gmres_ilu };

SolverMethod parse_solver_method(const std::string& name);
std::string to_string(SolverMethod m);

struct SolverOptions {
  SolverMethod method = SolverMethod::direct_lu;
  /// Relative residual target of the iterative path.
  double tolerance = 1e-10;
  int max_iterations = 2000;
  int restart = 100;
};

/// Linear solve failure: singular factorization, a direct residual above
/// its bound or iterative non-convergence. Carries the achieved residual
/// (NaN when unavailable).
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct BlockSolution {
  Vector U;
  Vector W;
  /// Two-norm of K X - B.
  double residual = 0.0;
  double rhs_norm = 0.0;
  int iterations = 0;
};

/// Stacked 2n x 2n operator [[M1, A1], [-A2, M2]]: all U unknowns first,
/// then all W unknowns.
SparseMatrix monolithic(const BlockSystem& system);

/// Solves the coupled block system. Keeps the symbolic analysis of the last
/// monolithic pattern so that a sequence of systems with one sparsity
/// pattern (the time loop) only refactorizes numerically.
class BlockSolver {
 public:
  explicit BlockSolver(SolverOptions options = {});
  ~BlockSolver();
  BlockSolver(BlockSolver&&) noexcept;
  BlockSolver& operator=(BlockSolver&&) noexcept;

  BlockSolution solve(const BlockSystem& system);
  const SolverOptions& options() const { return options_; }

 private:
  struct Impl;
  SolverOptions options_;
  std::unique_ptr<Impl> impl_;
};

BlockSolution solve_block(const BlockSystem& system, SolverMethod method = SolverMethod::direct_lu);

}  // namespace chfem
