#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "chfem/mesh.hpp"

namespace chfem {

inline constexpr std::size_t kMaxLocalDofs = 6;

using Vector = Eigen::VectorXd;
using ScalarFn = std::function<double(Point)>;
using SpaceTimeFn = std::function<double(Point, double)>;

/// Barycentric coordinates (l0, l1, l2) on a triangle; l1 and l2 double as
/// the reference coordinates (xi, eta) of the unit triangle.
using Barycentric = std::array<double, 3>;

/// Triangle quadrature rule with weights normalized to sum to one. The
/// integral over a physical triangle is area * sum_q w_q f(x_q).
struct QuadratureRule {
  std::vector<Barycentric> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// Positive-weight rule exact for polynomials of total degree <= degree.
/// Supported degrees: 0..6. Throws std::invalid_argument otherwise.
QuadratureRule quadrature_for(int degree);

/// 3-point Gauss-Legendre rule on [0, 1] (exact to degree 5).
struct EdgeQuadrature {
  std::array<double, 3> points;
  std::array<double, 3> weights;
};
EdgeQuadrature edge_gauss3();

struct BasisValues {
  std::size_t count = 0;
  std::array<double, kMaxLocalDofs> values{};
  /// Gradients with respect to the reference coordinates (xi, eta).
  std::array<std::array<double, 2>, kMaxLocalDofs> grads{};
};

/// Lagrange shape functions of degree 1 or 2 at a barycentric point. Local
/// ordering: vertices 0, 1, 2, then (P2) midpoints of edges (1,2), (2,0), (0,1).
BasisValues eval_basis(int degree, const Barycentric& b);

/// Affine map of one triangle: x = p0 + J * (xi, eta).
struct CellGeometry {
  Point origin;
  std::array<std::array<double, 2>, 2> jac{};
  /// Inverse-transpose of jac, maps reference gradients to physical ones.
  std::array<std::array<double, 2>, 2> inv_jac_t{};
  double area = 0.0;

  Point map(const Barycentric& b) const;
  std::array<double, 2> physical_grad(const std::array<double, 2>& ref) const;
};

/// Boundary edge with the space's DOFs on it: endpoints, then the midpoint
/// for P2.
struct BoundaryFace {
  std::array<std::size_t, 3> dofs{};
  std::size_t count = 0;
  Point a;
  Point b;
  Side side;
};

/// Continuous Lagrange space P1 or P2 on a uniform mesh. P2 edge DOFs follow
/// the vertex DOFs, edges ordered by (min vertex, max vertex).
class FeSpace {
 public:
  FeSpace(std::shared_ptr<const Mesh> mesh, int degree);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  int degree() const { return degree_; }
  std::size_t ndof() const { return dof_coords_.size(); }
  std::size_t dofs_per_cell() const { return local_; }
  std::size_t num_cells() const { return geometry_.size(); }

  std::span<const std::size_t> cell_dofs(std::size_t cell) const {
    return {cell_dofs_.data() + cell * local_, local_};
  }
  const std::vector<Point>& dof_coords() const { return dof_coords_; }
  const CellGeometry& geometry(std::size_t cell) const { return geometry_[cell]; }
  /// Sorted DOF indices located on the boundary.
  const std::vector<std::size_t>& boundary_dofs() const { return boundary_dofs_; }
  const std::vector<BoundaryFace>& boundary_faces() const { return boundary_faces_; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  int degree_;
  std::size_t local_;
  std::vector<std::size_t> cell_dofs_;
  std::vector<Point> dof_coords_;
  std::vector<CellGeometry> geometry_;
  std::vector<std::size_t> boundary_dofs_;
  std::vector<BoundaryFace> boundary_faces_;
};

/// Throws std::invalid_argument for degrees other than 1 and 2.
std::shared_ptr<const FeSpace> build_space(std::shared_ptr<const Mesh> mesh, int degree);

/// Coefficient vector of one scalar unknown.
class Field {
 public:
  Field() = default;
  explicit Field(std::shared_ptr<const FeSpace> space);
  Field(std::shared_ptr<const FeSpace> space, Vector coeffs);

  const FeSpace& space() const { return *space_; }
  const std::shared_ptr<const FeSpace>& space_ptr() const { return space_; }
  const Vector& coeffs() const { return coeffs_; }
  Vector& coeffs() { return coeffs_; }
  std::size_t size() const { return static_cast<std::size_t>(coeffs_.size()); }

  bool all_finite() const;
  double min() const { return coeffs_.minCoeff(); }
  double max() const { return coeffs_.maxCoeff(); }

 private:
  std::shared_ptr<const FeSpace> space_;
  Vector coeffs_;
};

/// Nodal interpolation. Throws std::domain_error naming the point if g is
/// not finite at a DOF.
Field interpolate(std::shared_ptr<const FeSpace> space, const ScalarFn& g);

/// Value of the finite element function at p. Throws std::out_of_range when
/// p is outside the mesh.
double eval_field(const Field& field, Point p);

/// Basis functions tabulated at the points of one quadrature rule.
struct TabulatedBasis {
  TabulatedBasis(int degree, QuadratureRule rule);

  QuadratureRule rule;
  std::size_t ndofs;
  std::vector<BasisValues> at;
};

/// Per-cell evaluation of basis values and physical gradients at quadrature
/// points.
class CellValues {
 public:
  CellValues(const FeSpace& space, int quadrature_degree);

  void reinit(std::size_t cell);

  std::size_t num_points() const { return table_.rule.size(); }
  std::size_t num_dofs() const { return table_.ndofs; }
  double JxW(std::size_t q) const { return jxw_[q]; }
  double shape(std::size_t q, std::size_t i) const { return table_.at[q].values[i]; }
  const std::array<double, 2>& grad(std::size_t q, std::size_t i) const { return grads_[q][i]; }
  Point point(std::size_t q) const { return points_[q]; }
  std::span<const std::size_t> dofs() const { return dofs_; }

  double value_of(const Vector& coeffs, std::size_t q) const;
  std::array<double, 2> grad_of(const Vector& coeffs, std::size_t q) const;

 private:
  const FeSpace& space_;
  TabulatedBasis table_;
  std::span<const std::size_t> dofs_;
  std::vector<double> jxw_;
  std::vector<Point> points_;
  std::vector<std::array<std::array<double, 2>, kMaxLocalDofs>> grads_;
};

}  // namespace chfem
