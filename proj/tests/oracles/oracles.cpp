#include "oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

namespace chfem::oracles {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

std::vector<double> DenseMatrix::multiply(const std::vector<double>& x) const {
  if (x.size() != cols_) {
    throw std::invalid_argument("DenseMatrix::multiply: size mismatch");
  }
  std::vector<double> y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
      s += (*this)(i, j) * x[j];
    }
    y[i] = s;
  }
  return y;
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = 1.0;
  }
  return m;
}

std::vector<double> dense_solve(DenseMatrix a, std::vector<double> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) {
    throw std::invalid_argument("dense_solve: matrix must be square and match the right-hand side");
  }
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      scale = std::max(scale, std::abs(a(i, j)));
    }
  }
  const double threshold = 1e-14 * (scale > 0.0 ? scale : 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > std::abs(a(p, k))) {
        p = i;
      }
    }
    if (std::abs(a(p, k)) < threshold) {
      throw SingularMatrix("dense_solve: singular matrix (pivot " + std::to_string(k) + ")");
    }
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(k, j), a(p, j));
      }
      std::swap(b[k], b[p]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = a(i, k) / a(k, k);
      if (l == 0.0) {
        continue;
      }
      for (std::size_t j = k; j < n; ++j) {
        a(i, j) -= l * a(k, j);
      }
      b[i] -= l * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < n; ++j) {
      s -= a(k, j) * x[j];
    }
    x[k] = s / a(k, k);
  }
  return x;
}

double fd_laplacian(const std::function<double(Point)>& g, Point p, double step) {
  const double c = g(p);
  return (g({p.x + step, p.y}) + g({p.x - step, p.y}) + g({p.x, p.y + step}) + g({p.x, p.y - step}) - 4.0 * c) /
         (step * step);
}

double fd_derivative(const std::function<double(double)>& f, double x, double step) {
  return (f(x + step) - f(x - step)) / (2.0 * step);
}

namespace {

template <std::size_t N>
struct Gauss1d {
  std::array<double, N> x;
  std::array<double, N> w;
};

// Nodes and weights on [-1, 1].
const Gauss1d<3> kGauss3{{-0.7745966692414834, 0.0, 0.7745966692414834},
                         {0.5555555555555556, 0.8888888888888888, 0.5555555555555556}};
const Gauss1d<5> kGauss5{{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640},
                         {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                          0.2369268850561891}};

template <std::size_t N>
double tensor(const std::function<double(Point)>& g, const Rect& r, const Gauss1d<N>& rule) {
  const double cx = 0.5 * (r.xmin + r.xmax);
  const double cy = 0.5 * (r.ymin + r.ymax);
  const double hx = 0.5 * r.width();
  const double hy = 0.5 * r.height();
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      s += rule.w[i] * rule.w[j] * g({cx + hx * rule.x[i], cy + hy * rule.x[j]});
    }
  }
  return s * hx * hy;
}

double recurse(const std::function<double(Point)>& g, const Rect& r, double tol, double total_area, int depth,
               int max_depth) {
  const double coarse = tensor(g, r, kGauss3);
  const double fine = tensor(g, r, kGauss5);
  const double local_tol = tol * r.area() / total_area;
  if (std::abs(fine - coarse) <= local_tol) {
    return fine;
  }
  if (depth >= max_depth) {
    throw SubdivisionLimit("adaptive_quad_2d: subdivision limit exceeded");
  }
  const double mx = 0.5 * (r.xmin + r.xmax);
  const double my = 0.5 * (r.ymin + r.ymax);
  return recurse(g, {r.xmin, mx, r.ymin, my}, tol, total_area, depth + 1, max_depth) +
         recurse(g, {mx, r.xmax, r.ymin, my}, tol, total_area, depth + 1, max_depth) +
         recurse(g, {r.xmin, mx, my, r.ymax}, tol, total_area, depth + 1, max_depth) +
         recurse(g, {mx, r.xmax, my, r.ymax}, tol, total_area, depth + 1, max_depth);
}

}  // namespace

double adaptive_quad_2d(const std::function<double(Point)>& g, Rect rect, double tol, int max_depth) {
  if (!(rect.area() > 0.0) || !(tol > 0.0)) {
    throw std::invalid_argument("adaptive_quad_2d: need a non-degenerate rectangle and tol > 0");
  }
  return recurse(g, rect, tol, rect.area(), 0, max_depth);
}

}  // namespace chfem::oracles
