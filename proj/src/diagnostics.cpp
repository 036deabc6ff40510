#include "chfem/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chfem {

namespace {
using Index = Eigen::Index;
}

ErrorReport error_norms(const Field& field, const SpaceTimeFn& exact, const GradFn& exact_grad, double t,
                        const ErrorOptions& options) {
  const FeSpace& space = field.space();
  const bool need_interp = options.value_reference == ErrorReference::interpolant ||
                           options.gradient_reference == ErrorReference::interpolant;
  Vector interp;
  if (need_interp) {
    const auto& coords = space.dof_coords();
    interp.resize(static_cast<Index>(coords.size()));
    for (std::size_t i = 0; i < coords.size(); ++i) {
      interp[static_cast<Index>(i)] = exact(coords[i], t);
    }
  }

  CellValues cv(space, 2 * space.degree() + 2);
  double l2 = 0.0;
  double semi = 0.0;
  double linf = 0.0;
  for (std::size_t c = 0; c < space.num_cells(); ++c) {
    cv.reinit(c);
    for (std::size_t q = 0; q < cv.num_points(); ++q) {
      const Point x = cv.point(q);
      const double uh = cv.value_of(field.coeffs(), q);
      const double ref =
          options.value_reference == ErrorReference::exact ? exact(x, t) : cv.value_of(interp, q);
      const auto gh = cv.grad_of(field.coeffs(), q);
      const auto gref =
          options.gradient_reference == ErrorReference::exact ? exact_grad(x, t) : cv.grad_of(interp, q);
      const double e = uh - ref;
      const double ex = gh[0] - gref[0];
      const double ey = gh[1] - gref[1];
      l2 += cv.JxW(q) * e * e;
      semi += cv.JxW(q) * (ex * ex + ey * ey);
      linf = std::max(linf, std::abs(e));
    }
  }
  const auto& coords = space.dof_coords();
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const double ref = need_interp && options.value_reference == ErrorReference::interpolant
                           ? interp[static_cast<Index>(i)]
                           : exact(coords[i], t);
    linf = std::max(linf, std::abs(field.coeffs()[static_cast<Index>(i)] - ref));
  }

  ErrorReport r;
  r.field = options.field;
  r.t = t;
  r.l2 = std::sqrt(l2);
  r.h1_seminorm = std::sqrt(semi);
  r.h1 = std::sqrt(l2 + semi);
  r.linf = linf;
  return r;
}

double l2_norm(const Field& field) {
  CellValues cv(field.space(), 2 * field.space().degree());
  double s = 0.0;
  for (std::size_t c = 0; c < field.space().num_cells(); ++c) {
    cv.reinit(c);
    for (std::size_t q = 0; q < cv.num_points(); ++q) {
      const double v = cv.value_of(field.coeffs(), q);
      s += cv.JxW(q) * v * v;
    }
  }
  return std::sqrt(s);
}

double l2_distance(const Field& a, const Field& b) {
  if (&a.space() != &b.space()) {
    throw std::invalid_argument("l2_distance: fields live in different spaces");
  }
  return l2_norm(Field(a.space_ptr(), a.coeffs() - b.coeffs()));
}

double discrete_energy(const Field& field, const ProblemModel& model) {
  const FeSpace& space = field.space();
  CellValues cv(space, 2 * space.degree() + 2);
  double e = 0.0;
  for (std::size_t c = 0; c < space.num_cells(); ++c) {
    cv.reinit(c);
    for (std::size_t q = 0; q < cv.num_points(); ++q) {
      const double u = cv.value_of(field.coeffs(), q);
      const auto g = cv.grad_of(field.coeffs(), q);
      double density = 0.5 * model.gamma * (g[0] * g[0] + g[1] * g[1]) + model.energy.phi(u);
      if (model.spatial_energy) {
        density -= model.spatial_energy(cv.point(q)) * u;
      }
      e += cv.JxW(q) * density;
    }
  }
  return e;
}

double total_mass(const Field& field) {
  const FeSpace& space = field.space();
  CellValues cv(space, space.degree());
  double m = 0.0;
  for (std::size_t c = 0; c < space.num_cells(); ++c) {
    cv.reinit(c);
    for (std::size_t q = 0; q < cv.num_points(); ++q) {
      m += cv.JxW(q) * cv.value_of(field.coeffs(), q);
    }
  }
  return m;
}

double droplet_height(const Field& field, Point p) { return eval_field(field, p); }

ConvergenceTable observed_order(const std::vector<ConvergenceRow>& rows, double tau) {
  if (rows.size() < 2) {
    throw std::invalid_argument("observed_order: at least two rows are required");
  }
  if (!(tau > 1.0)) {
    throw std::invalid_argument("observed_order: refinement factor must exceed 1");
  }
  for (const auto& r : rows) {
    if (!(r.error > 0.0) || !std::isfinite(r.error)) {
      throw std::domain_error("observed_order: order undefined for non-positive error");
    }
  }
  ConvergenceTable t;
  t.refinement = tau;
  t.rows = rows;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    t.rows[i].order = std::log(rows[i].error / rows[i + 1].error) / std::log(tau);
  }
  t.rows.back().order.reset();
  return t;
}

}  // namespace chfem
