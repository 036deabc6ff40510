#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chfem/models.hpp"

namespace chfem {

struct ErrorReport {
  std::string field;
  double t = 0.0;
  double l2 = 0.0;
  double h1 = 0.0;
  /// |u - u_h|_{H1}; h1^2 = l2^2 + h1_seminorm^2.
  double h1_seminorm = 0.0;
  double linf = 0.0;
};

/// What the discrete field is compared against.
///  - exact: the closed form at every quadrature point.
///  - interpolant: the nodal interpolant of the closed form in the field's
///    space. Differences against the interpolant expose the superclose
///    behavior of the discrete solution.
enum class ErrorReference { exact, interpolant };

struct ErrorOptions {
  std::string field = "u";
  /// Reference for the L2 and Linf parts.
  ErrorReference value_reference = ErrorReference::exact;
  /// Reference for the gradient part of the H1 norm.
  ErrorReference gradient_reference = ErrorReference::exact;
};

/// L2, H1 and Linf errors by elementwise quadrature exact to degree 2k+2.
/// Linf is the maximum over quadrature points and DOF nodes.
ErrorReport error_norms(const Field& field, const SpaceTimeFn& exact, const GradFn& exact_grad, double t,
                        const ErrorOptions& options = {});

double l2_norm(const Field& field);
/// ||a - b||_{L2}; both fields must share one space.
double l2_distance(const Field& a, const Field& b);

/// int (gamma/2 |grad u|^2 + phi(u) - spatial_energy(x) u) dx.
double discrete_energy(const Field& field, const ProblemModel& model);

double total_mass(const Field& field);

/// Value at a point; throws std::out_of_range outside the mesh.
double droplet_height(const Field& field, Point p = {0.0, 0.0});

struct ConvergenceRow {
  /// Mesh size or time step.
  double size = 0.0;
  double error = 0.0;
  /// ln(e_i / e_{i+1}) / ln(tau); absent on the last row.
  std::optional<double> order;
};

struct ConvergenceTable {
  double refinement = 2.0;
  std::vector<ConvergenceRow> rows;
};

/// Observed orders between consecutive rows (ordered coarse to fine).
/// Throws std::invalid_argument for fewer than two rows or tau <= 1 and
/// std::domain_error for a non-positive error.
ConvergenceTable observed_order(const std::vector<ConvergenceRow>& rows, double tau);

}  // namespace chfem
