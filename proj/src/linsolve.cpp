#include "chfem/linsolve.hpp"

#include <Eigen/UmfPackSupport>
#include <unsupported/Eigen/IterativeSolvers>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace chfem {

namespace {

using Index = Eigen::Index;

void check_dimensions(const BlockSystem& s) {
  const Index n = s.F.size();
  const auto square = [n](const SparseMatrix& m) { return m.rows() == n && m.cols() == n; };
  if (s.G.size() != n || !square(s.M1) || !square(s.A1) || !square(s.A2) || !square(s.M2)) {
    throw std::invalid_argument("solve_block: inconsistent block dimensions");
  }
  if (!s.F.allFinite() || !s.G.allFinite()) {
    throw std::domain_error("solve_block: non-finite right-hand side");
  }
}

double inf_norm(const SparseMatrix& k) {
  Vector rows = Vector::Zero(k.rows());
  for (Index c = 0; c < k.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(k, c); it; ++it) {
      rows[it.row()] += std::abs(it.value());
    }
  }
  return rows.size() > 0 ? rows.maxCoeff() : 0.0;
}

bool same_pattern(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.nonZeros() != b.nonZeros()) {
    return false;
  }
  return std::equal(a.outerIndexPtr(), a.outerIndexPtr() + a.outerSize() + 1, b.outerIndexPtr()) &&
         std::equal(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros(), b.innerIndexPtr());
}

}  // namespace

SolverMethod parse_solver_method(const std::string& name) {
  if (name == "direct_lu" || name == "direct") {
    return SolverMethod::direct_lu;
  }
  if (name == "gmres_ilu" || name == "gmres") {
    return SolverMethod::gmres_ilu;
  }
  throw std::invalid_argument("unknown solver method '" + name + "'");
}

std::string to_string(SolverMethod m) { return m == SolverMethod::direct_lu ? "direct_lu" : "gmres_ilu"; }

SparseMatrix monolithic(const BlockSystem& s) {
  const Index n = static_cast<Index>(s.block_size());
  SparseMatrix m1 = s.M1, a1 = s.A1, a2 = s.A2, m2 = s.M2;
  m1.makeCompressed();
  a1.makeCompressed();
  a2.makeCompressed();
  m2.makeCompressed();
  const Index nnz = m1.nonZeros() + a1.nonZeros() + a2.nonZeros() + m2.nonZeros();

  SparseMatrix k(2 * n, 2 * n);
  k.reserve(nnz);
  std::vector<int> outer(static_cast<std::size_t>(2 * n + 1), 0);
  std::vector<int> inner;
  std::vector<double> values;
  inner.reserve(static_cast<std::size_t>(nnz));
  values.reserve(static_cast<std::size_t>(nnz));
  const auto append = [&](const SparseMatrix& b, Index col, Index row_shift, double sign) {
    for (SparseMatrix::InnerIterator it(b, col); it; ++it) {
      inner.push_back(static_cast<int>(it.row() + row_shift));
      values.push_back(sign * it.value());
    }
  };
  for (Index c = 0; c < n; ++c) {
    append(m1, c, 0, 1.0);
    append(a2, c, n, -1.0);
    outer[static_cast<std::size_t>(c + 1)] = static_cast<int>(inner.size());
  }
  for (Index c = 0; c < n; ++c) {
    append(a1, c, 0, 1.0);
    append(m2, c, n, 1.0);
    outer[static_cast<std::size_t>(n + c + 1)] = static_cast<int>(inner.size());
  }
  k.resizeNonZeros(static_cast<Index>(inner.size()));
  std::copy(outer.begin(), outer.end(), k.outerIndexPtr());
  std::copy(inner.begin(), inner.end(), k.innerIndexPtr());
  std::copy(values.begin(), values.end(), k.valuePtr());
  return k;
}

struct BlockSolver::Impl {
  SparseMatrix pattern;
  bool analyzed = false;
  Eigen::UmfPackLU<SparseMatrix> lu;
};

BlockSolver::BlockSolver(SolverOptions options) : options_(options), impl_(std::make_unique<Impl>()) {}
BlockSolver::~BlockSolver() = default;
BlockSolver::BlockSolver(BlockSolver&&) noexcept = default;
BlockSolver& BlockSolver::operator=(BlockSolver&&) noexcept = default;

BlockSolution BlockSolver::solve(const BlockSystem& system) {
  check_dimensions(system);
  const Index n = static_cast<Index>(system.block_size());
  const SparseMatrix k = monolithic(system);
  Vector b(2 * n);
  b << system.F, system.G;

  Vector x;
  int iterations = 0;
  if (options_.method == SolverMethod::direct_lu) {
    if (!impl_->analyzed || !same_pattern(impl_->pattern, k)) {
      impl_->lu.analyzePattern(k);
      impl_->pattern = k;
      impl_->analyzed = true;
    }
    impl_->lu.factorize(k);
    if (impl_->lu.info() != Eigen::Success) {
      throw SolverError("solve_block: sparse LU factorization failed (singular or ill-posed system)",
                        std::numeric_limits<double>::quiet_NaN());
    }
    x = impl_->lu.solve(b);
    if (impl_->lu.info() != Eigen::Success) {
      throw SolverError("solve_block: sparse LU solve failed", std::numeric_limits<double>::quiet_NaN());
    }
  } else {
    Eigen::GMRES<SparseMatrix, Eigen::IncompleteLUT<double, int>> gmres;
    gmres.preconditioner().setDroptol(1e-6);
    gmres.preconditioner().setFillfactor(20);
    gmres.setTolerance(options_.tolerance);
    gmres.setMaxIterations(options_.max_iterations);
    gmres.set_restart(options_.restart);
    gmres.compute(k);
    if (gmres.info() != Eigen::Success) {
      throw SolverError("solve_block: incomplete LU preconditioner failed", std::numeric_limits<double>::quiet_NaN());
    }
    x = gmres.solve(b);
    iterations = static_cast<int>(gmres.iterations());
    if (gmres.info() != Eigen::Success) {
      std::ostringstream msg;
      msg << "solve_block: GMRES did not converge in " << gmres.iterations()
          << " iterations, relative residual " << gmres.error();
      throw SolverError(msg.str(), gmres.error());
    }
  }

  BlockSolution out;
  const double residual = (k * x - b).norm();
  out.residual = residual;
  out.rhs_norm = b.norm();
  out.iterations = iterations;
  if (!x.allFinite()) {
    throw SolverError("solve_block: non-finite solution", residual);
  }
  if (options_.method == SolverMethod::direct_lu) {
    const double bound = 1e-10 * (b.norm() + inf_norm(k) * x.norm());
    if (!(residual <= bound)) {
      std::ostringstream msg;
      msg << "solve_block: direct residual " << residual << " exceeds bound " << bound;
      throw SolverError(msg.str(), residual);
    }
  }
  out.U = x.head(n);
  out.W = x.tail(n);
  return out;
}

BlockSolution solve_block(const BlockSystem& system, SolverMethod method) {
  SolverOptions opts;
  opts.method = method;
  return BlockSolver(opts).solve(system);
}

}  // namespace chfem
