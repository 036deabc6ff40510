#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "chfem/mesh.hpp"

namespace chfem::oracles {

/// Row-major dense matrix; deliberately independent of Eigen.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<double> multiply(const std::vector<double>& x) const;
  static DenseMatrix identity(std::size_t n);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

class SingularMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// LU with partial pivoting. Throws SingularMatrix when a pivot falls below
/// 1e-14 times the largest entry, std::invalid_argument on shape mismatch.
std::vector<double> dense_solve(DenseMatrix a, std::vector<double> b);

/// 5-point Laplacian of g at p.
double fd_laplacian(const std::function<double(chfem::Point)>& g, chfem::Point p, double step);

/// Central first derivative of a scalar map.
double fd_derivative(const std::function<double(double)>& f, double x, double step);

class SubdivisionLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integral over rect by recursive quadrisection. Each rectangle compares a
/// 3x3 with a 5x5 tensor Gauss rule; the local tolerance is scaled by area.
/// Throws SubdivisionLimit past max_depth levels.
double adaptive_quad_2d(const std::function<double(chfem::Point)>& g, chfem::Rect rect, double tol,
                        int max_depth = 14);

}  // namespace chfem::oracles
