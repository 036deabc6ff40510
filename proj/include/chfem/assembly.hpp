#pragma once

#include <Eigen/SparseCore>

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chfem/fe_space.hpp"

namespace chfem {

/// Compressed sparse column matrix. All matrices assembled on one space
/// share the same structural pattern.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Scalar coefficient evaluated at quadrature points from the values of a
/// list of fields (all in the assembling space) and the physical point.
struct PointwiseCoefficient {
  std::vector<const Field*> fields;
  std::function<double(std::span<const double> values, Point x)> fn;

  static PointwiseCoefficient constant(double c);
};

enum class BcKind { noflux, dirichlet, neumann };

BcKind parse_bc_kind(const std::string& name);
std::string to_string(BcKind k);

/// Normal derivative data g(x, t, n) on the boundary.
using NormalFluxFn = std::function<double(Point, double, Point)>;

struct BcSpec {
  BcKind kind = BcKind::noflux;
  /// Dirichlet values for u and w.
  SpaceTimeFn u_value;
  SpaceTimeFn w_value;
  /// Neumann data: du/dn and dw/dn.
  NormalFluxFn u_flux;
  NormalFluxFn w_flux;
};

/// Blocks of [[M1, A1], [-A2, M2]] [U; W] = [F; G]. A2 is stored with its
/// own sign; the monolithic operator uses -A2.
struct BlockSystem {
  SparseMatrix M1;
  SparseMatrix A1;
  SparseMatrix A2;
  SparseMatrix M2;
  Vector F;
  Vector G;

  std::size_t block_size() const { return static_cast<std::size_t>(F.size()); }
};

/// Element-loop assembler bound to one space. The sparsity pattern and the
/// per-cell scatter map are built once; every matrix it returns has that
/// pattern, zeros included.
class Assembler {
 public:
  explicit Assembler(std::shared_ptr<const FeSpace> space);

  const FeSpace& space() const { return *space_; }
  const std::shared_ptr<const FeSpace>& space_ptr() const { return space_; }

  /// Matrix with the space's pattern and all values zero.
  SparseMatrix zero_matrix() const;

  SparseMatrix mass() const;
  SparseMatrix stiffness() const;
  /// int c * phi_j * phi_i
  SparseMatrix weighted_mass(const PointwiseCoefficient& c) const;
  /// int c * grad phi_j . grad phi_i
  SparseMatrix weighted_stiffness(const PointwiseCoefficient& c) const;
  /// int c * phi_j * (grad w . grad phi_i); the Newton linearization of the
  /// mobility term.
  SparseMatrix gradient_coupling(const PointwiseCoefficient& c, const Field& w) const;

  /// int s(x) * phi_i
  Vector load(const PointwiseCoefficient& s) const;
  Vector load(const SpaceTimeFn& s, double t) const;
  /// int c * grad w . grad phi_i
  Vector weighted_stiffness_action(const PointwiseCoefficient& c, const Field& w) const;

  /// Boundary integral of g(x, n) * weight(x) * phi_i over all boundary edges.
  Vector boundary_load(const std::function<double(Point, Point)>& g, const PointwiseCoefficient* weight) const;

  int base_quadrature_degree() const { return 2 * space_->degree(); }
  int nonlinear_quadrature_degree() const { return 2 * space_->degree() + 2; }

 private:
  template <class Kernel>
  SparseMatrix assemble_matrix(int quad_degree, Kernel&& kernel) const;

  std::shared_ptr<const FeSpace> space_;
  SparseMatrix pattern_;
  /// Offsets into pattern_.valuePtr(), dofs_per_cell^2 per cell, row-major
  /// in (test i, trial j).
  std::vector<int> scatter_;
};

SparseMatrix assemble_mass(const std::shared_ptr<const FeSpace>& space);

/// Stiffness matrix with optional coefficient map(field(x)); the coefficient
/// is 1 when neither is given, field(x) when only the field is given and
/// map(1) when only the map is given.
SparseMatrix assemble_stiffness(const std::shared_ptr<const FeSpace>& space, const Field* coefficient_field = nullptr,
                                const std::function<double(double)>& coefficient_map = {});

/// Linearization of the energy term about u_prev: returns (J, b) with
/// J = int phi2(u_prev) phi_j phi_i and b = int (phi1(u_prev) - phi2(u_prev) u_prev) phi_i,
/// so that the Taylor-expanded energy load is J U + b. Throws std::domain_error
/// on a non-finite coefficient.
std::pair<SparseMatrix, Vector> assemble_linearized_energy(const Assembler& assembler, const Field& u_prev,
                                                           const std::function<double(double)>& phi1,
                                                           const std::function<double(double)>& phi2);
std::pair<SparseMatrix, Vector> assemble_linearized_energy(const std::shared_ptr<const FeSpace>& space,
                                                           const Field& u_prev,
                                                           const std::function<double(double)>& phi1,
                                                           const std::function<double(double)>& phi2);

Vector assemble_source(const std::shared_ptr<const FeSpace>& space, const SpaceTimeFn& s, double t);

/// Imposes boundary conditions on the block system at time t.
///  - noflux: no action.
///  - dirichlet: u and w prescribed on every boundary DOF by row replacement
///    and symmetric column elimination into the right-hand side.
///  - neumann: adds mobility * int dw/dn v to F and -gamma * int du/dn q to G.
/// `mobility` weights the flux of the first equation (1 when null).
void apply_bcs(BlockSystem& system, const BcSpec& bc, const Assembler& assembler, double t, double gamma,
               const PointwiseCoefficient* mobility = nullptr);

/// Row/column elimination of the given boundary DOFs on both unknowns.
void apply_dirichlet(BlockSystem& system, std::span<const std::size_t> dofs, std::span<const double> u_values,
                     std::span<const double> w_values);

/// Neumann right-hand side contributions (F part, G part).
std::pair<Vector, Vector> neumann_loads(const BcSpec& bc, const Assembler& assembler, double t, double gamma,
                                        const PointwiseCoefficient* mobility);

}  // namespace chfem
