#include "chfem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace chfem {

namespace {

using Index = Eigen::Index;

struct CoefficientEval {
  explicit CoefficientEval(const PointwiseCoefficient& c) : coeff(c), values(c.fields.size()) {}

  double operator()(const CellValues& cv, std::size_t q) {
    for (std::size_t f = 0; f < coeff.fields.size(); ++f) {
      values[f] = cv.value_of(coeff.fields[f]->coeffs(), q);
    }
    return coeff.fn(values, cv.point(q));
  }

  const PointwiseCoefficient& coeff;
  std::vector<double> values;
};

void check_fields(const PointwiseCoefficient& c, const FeSpace& space) {
  for (const Field* f : c.fields) {
    if (f == nullptr || f->size() != space.ndof()) {
      throw std::invalid_argument("assembly: coefficient field does not belong to the assembling space");
    }
  }
}

// Edge shape functions restricted to a boundary face, parameter s in [0, 1]
// from face.a to face.b.
std::array<double, 3> edge_shapes(int degree, double s) {
  if (degree == 1) {
    return {1.0 - s, s, 0.0};
  }
  return {(1.0 - s) * (1.0 - 2.0 * s), s * (2.0 * s - 1.0), 4.0 * s * (1.0 - s)};
}

}  // namespace

PointwiseCoefficient PointwiseCoefficient::constant(double c) {
  return {{}, [c](std::span<const double>, Point) { return c; }};
}

Assembler::Assembler(std::shared_ptr<const FeSpace> space) : space_(std::move(space)) {
  const FeSpace& s = *space_;
  const auto n = static_cast<Index>(s.ndof());
  const std::size_t nl = s.dofs_per_cell();
  std::vector<Eigen::Triplet<double, int>> triplets;
  triplets.reserve(s.num_cells() * nl * nl);
  for (std::size_t c = 0; c < s.num_cells(); ++c) {
    const auto dofs = s.cell_dofs(c);
    for (std::size_t i = 0; i < nl; ++i) {
      for (std::size_t j = 0; j < nl; ++j) {
        triplets.emplace_back(static_cast<int>(dofs[i]), static_cast<int>(dofs[j]), 0.0);
      }
    }
  }
  pattern_.resize(n, n);
  pattern_.setFromTriplets(triplets.begin(), triplets.end());
  pattern_.makeCompressed();

  scatter_.resize(s.num_cells() * nl * nl);
  const int* outer = pattern_.outerIndexPtr();
  const int* inner = pattern_.innerIndexPtr();
  for (std::size_t c = 0; c < s.num_cells(); ++c) {
    const auto dofs = s.cell_dofs(c);
    for (std::size_t i = 0; i < nl; ++i) {
      for (std::size_t j = 0; j < nl; ++j) {
        const int col = static_cast<int>(dofs[j]);
        const int row = static_cast<int>(dofs[i]);
        const int* begin = inner + outer[col];
        const int* end = inner + outer[col + 1];
        const int* it = std::lower_bound(begin, end, row);
        scatter_[(c * nl + i) * nl + j] = static_cast<int>(it - inner);
      }
    }
  }
}

SparseMatrix Assembler::zero_matrix() const {
  SparseMatrix m = pattern_;
  std::fill(m.valuePtr(), m.valuePtr() + m.nonZeros(), 0.0);
  return m;
}

template <class Kernel>
SparseMatrix Assembler::assemble_matrix(int quad_degree, Kernel&& kernel) const {
  SparseMatrix m = zero_matrix();
  double* values = m.valuePtr();
  CellValues cv(*space_, quad_degree);
  const std::size_t nl = space_->dofs_per_cell();
  std::array<double, kMaxLocalDofs * kMaxLocalDofs> local{};
  for (std::size_t c = 0; c < space_->num_cells(); ++c) {
    cv.reinit(c);
    local.fill(0.0);
    kernel(cv, local);
    const int* sc = scatter_.data() + c * nl * nl;
    for (std::size_t k = 0; k < nl * nl; ++k) {
      values[sc[k]] += local[k];
    }
  }
  return m;
}

SparseMatrix Assembler::mass() const {
  const std::size_t nl = space_->dofs_per_cell();
  return assemble_matrix(base_quadrature_degree(), [nl](const CellValues& cv, auto& local) {
    for (std::size_t q = 0; q < cv.num_points(); ++q) {
      const double jxw = cv.JxW(q);
      for (std::size_t i = 0; i < nl; ++i) {
        const double vi = cv.shape(q, i) * jxw;
        for (std::size_t j = 0; j < nl; ++j) {
          local[i * nl + j] += vi * cv.shape(q, j);
        }
      }
    }
  });
}

SparseMatrix Assembler::stiffness() const {
  const std::size_t nl = space_->dofs_per_cell();
  return assemble_matrix(base_quadrature_degree(), [nl](const CellValues& cv, auto& local) {
    for (std::size_t q = 0; q < cv.num_points(); ++q) {
      const double jxw = cv.JxW(q);
      for (std::size_t i = 0; i < nl; ++i) {
        const auto& gi = cv.grad(q, i);
        for (std::size_t j = 0; j < nl; ++j) {
          const auto& gj = cv.grad(q, j);
          local[i * nl + j] += jxw * (gi[0] * gj[0] + gi[1] * gj[1]);
        }
      }
    }
  });
}

SparseMatrix Assembler::weighted_mass(const PointwiseCoefficient& c) const {
  check_fields(c, *space_);
  const std::size_t nl = space_->dofs_per_cell();
  CoefficientEval eval(c);
  return assemble_matrix(nonlinear_quadrature_degree(), [&](const CellValues& cv, auto& local) {
    for (std::size_t q = 0; q < cv.num_points(); ++q) {
      const double w = eval(cv, q) * cv.JxW(q);
      for (std::size_t i = 0; i < nl; ++i) {
        const double vi = cv.shape(q, i) * w;
        for (std::size_t j = 0; j < nl; ++j) {
          local[i * nl + j] += vi * cv.shape(q, j);
        }
      }
    }
  });
}

SparseMatrix Assembler::weighted_stiffness(const PointwiseCoefficient& c) const {
  check_fields(c, *space_);
  const std::size_t nl = space_->dofs_per_cell();
  CoefficientEval eval(c);
  return assemble_matrix(nonlinear_quadrature_degree(), [&](const CellValues& cv, auto& local) {
    for (std::size_t q = 0; q < cv.num_points(); ++q) {
      const double w = eval(cv, q) * cv.JxW(q);
      for (std::size_t i = 0; i < nl; ++i) {
        const auto& gi = cv.grad(q, i);
        for (std::size_t j = 0; j < nl; ++j) {
          const auto& gj = cv.grad(q, j);
          local[i * nl + j] += w * (gi[0] * gj[0] + gi[1] * gj[1]);
        }
      }
    }
  });
}

SparseMatrix Assembler::gradient_coupling(const PointwiseCoefficient& c, const Field& w) const {
  check_fields(c, *space_);
  const std::size_t nl = space_->dofs_per_cell();
  CoefficientEval eval(c);
  return assemble_matrix(nonlinear_quadrature_degree(), [&](const CellValues& cv, auto& local) {
    for (std::size_t q = 0; q < cv.num_points(); ++q) {
      const double wt = eval(cv, q) * cv.JxW(q);
      const auto gw = cv.grad_of(w.coeffs(), q);
      for (std::size_t i = 0; i < nl; ++i) {
        const auto& gi = cv.grad(q, i);
        const double a = wt * (gw[0] * gi[0] + gw[1] * gi[1]);
        for (std::size_t j = 0; j < nl; ++j) {
          local[i * nl + j] += a * cv.shape(q, j);
        }
      }
    }
  });
}

Vector Assembler::load(const PointwiseCoefficient& s) const {
  check_fields(s, *space_);
  Vector b = Vector::Zero(static_cast<Index>(space_->ndof()));
  CellValues cv(*space_, nonlinear_quadrature_degree());
  CoefficientEval eval(s);
  for (std::size_t c = 0; c < space_->num_cells(); ++c) {
    cv.reinit(c);
    const auto dofs = cv.dofs();
    for (std::size_t q = 0; q < cv.num_points(); ++q) {
      const double w = eval(cv, q) * cv.JxW(q);
      for (std::size_t i = 0; i < cv.num_dofs(); ++i) {
        b[static_cast<Index>(dofs[i])] += w * cv.shape(q, i);
      }
    }
  }
  return b;
}

Vector Assembler::load(const SpaceTimeFn& s, double t) const {
  return load(PointwiseCoefficient{{}, [&s, t](std::span<const double>, Point x) { return s(x, t); }});
}

Vector Assembler::weighted_stiffness_action(const PointwiseCoefficient& c, const Field& w) const {
  check_fields(c, *space_);
  Vector b = Vector::Zero(static_cast<Index>(space_->ndof()));
  CellValues cv(*space_, nonlinear_quadrature_degree());
  CoefficientEval eval(c);
  for (std::size_t cell = 0; cell < space_->num_cells(); ++cell) {
    cv.reinit(cell);
    const auto dofs = cv.dofs();
    for (std::size_t q = 0; q < cv.num_points(); ++q) {
      const double wt = eval(cv, q) * cv.JxW(q);
      const auto gw = cv.grad_of(w.coeffs(), q);
      for (std::size_t i = 0; i < cv.num_dofs(); ++i) {
        const auto& gi = cv.grad(q, i);
        b[static_cast<Index>(dofs[i])] += wt * (gw[0] * gi[0] + gw[1] * gi[1]);
      }
    }
  }
  return b;
}

Vector Assembler::boundary_load(const std::function<double(Point, Point)>& g,
                                const PointwiseCoefficient* weight) const {
  if (weight != nullptr) {
    check_fields(*weight, *space_);
  }
  Vector b = Vector::Zero(static_cast<Index>(space_->ndof()));
  const EdgeQuadrature eq = edge_gauss3();
  const int degree = space_->degree();
  std::vector<double> values(weight != nullptr ? weight->fields.size() : 0);
  for (const BoundaryFace& f : space_->boundary_faces()) {
    const Point n = outward_normal(f.side);
    const double len = std::hypot(f.b.x - f.a.x, f.b.y - f.a.y);
    for (std::size_t q = 0; q < 3; ++q) {
      const double s = eq.points[q];
      const Point x{f.a.x + s * (f.b.x - f.a.x), f.a.y + s * (f.b.y - f.a.y)};
      const auto phi = edge_shapes(degree, s);
      double wt = eq.weights[q] * len * g(x, n);
      if (weight != nullptr) {
        for (std::size_t k = 0; k < values.size(); ++k) {
          const Vector& cf = weight->fields[k]->coeffs();
          double v = 0.0;
          for (std::size_t i = 0; i < f.count; ++i) {
            v += phi[i] * cf[static_cast<Index>(f.dofs[i])];
          }
          values[k] = v;
        }
        wt *= weight->fn(values, x);
      }
      for (std::size_t i = 0; i < f.count; ++i) {
        b[static_cast<Index>(f.dofs[i])] += wt * phi[i];
      }
    }
  }
  return b;
}

SparseMatrix assemble_mass(const std::shared_ptr<const FeSpace>& space) { return Assembler(space).mass(); }

SparseMatrix assemble_stiffness(const std::shared_ptr<const FeSpace>& space, const Field* coefficient_field,
                                const std::function<double(double)>& coefficient_map) {
  Assembler a(space);
  if (coefficient_field == nullptr && !coefficient_map) {
    return a.stiffness();
  }
  if (coefficient_field == nullptr) {
    return a.weighted_stiffness(PointwiseCoefficient::constant(coefficient_map(1.0)));
  }
  PointwiseCoefficient c;
  c.fields = {coefficient_field};
  const auto map = coefficient_map;
  c.fn = [map](std::span<const double> v, Point) { return map ? map(v[0]) : v[0]; };
  return a.weighted_stiffness(c);
}

std::pair<SparseMatrix, Vector> assemble_linearized_energy(const Assembler& assembler, const Field& u_prev,
                                                           const std::function<double(double)>& phi1,
                                                           const std::function<double(double)>& phi2) {
  const auto checked = [](double v, const char* what, double u, Point x) {
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "assemble_linearized_energy: " << what << " = " << v << " at u = " << u << ", point (" << x.x
          << ", " << x.y << ")";
      throw std::domain_error(msg.str());
    }
    return v;
  };
  PointwiseCoefficient jac{{&u_prev}, [&](std::span<const double> v, Point x) {
                             return checked(phi2(v[0]), "phi''", v[0], x);
                           }};
  PointwiseCoefficient rhs{{&u_prev}, [&](std::span<const double> v, Point x) {
                             const double d1 = checked(phi1(v[0]), "phi'", v[0], x);
                             const double d2 = checked(phi2(v[0]), "phi''", v[0], x);
                             return d1 - d2 * v[0];
                           }};
  return {assembler.weighted_mass(jac), assembler.load(rhs)};
}

std::pair<SparseMatrix, Vector> assemble_linearized_energy(const std::shared_ptr<const FeSpace>& space,
                                                           const Field& u_prev,
                                                           const std::function<double(double)>& phi1,
                                                           const std::function<double(double)>& phi2) {
  return assemble_linearized_energy(Assembler(space), u_prev, phi1, phi2);
}

Vector assemble_source(const std::shared_ptr<const FeSpace>& space, const SpaceTimeFn& s, double t) {
  return Assembler(space).load(s, t);
}

void apply_dirichlet(BlockSystem& sys, std::span<const std::size_t> dofs, std::span<const double> u_values,
                     std::span<const double> w_values) {
  const auto n = static_cast<Index>(sys.block_size());
  std::vector<char> constrained(static_cast<std::size_t>(n), 0);
  Vector gu = Vector::Zero(n);
  Vector gw = Vector::Zero(n);
  for (std::size_t k = 0; k < dofs.size(); ++k) {
    constrained[dofs[k]] = 1;
    gu[static_cast<Index>(dofs[k])] = u_values[k];
    gw[static_cast<Index>(dofs[k])] = w_values[k];
  }
  // Lift the prescribed columns into the right-hand side: K x = b with
  // x = x_free + g gives K x_free = b - K g.
  sys.F -= sys.M1 * gu + sys.A1 * gw;
  sys.G -= -(sys.A2 * gu) + sys.M2 * gw;

  const auto eliminate = [&](SparseMatrix& m, bool set_diagonal) {
    for (Index col = 0; col < m.outerSize(); ++col) {
      const bool ccol = constrained[static_cast<std::size_t>(col)] != 0;
      for (SparseMatrix::InnerIterator it(m, col); it; ++it) {
        const bool crow = constrained[static_cast<std::size_t>(it.row())] != 0;
        if (ccol || crow) {
          it.valueRef() = (set_diagonal && it.row() == col) ? 1.0 : 0.0;
        }
      }
    }
  };
  eliminate(sys.M1, true);
  eliminate(sys.A1, false);
  eliminate(sys.A2, false);
  eliminate(sys.M2, true);
  for (std::size_t k = 0; k < dofs.size(); ++k) {
    const auto i = static_cast<Index>(dofs[k]);
    sys.F[i] = u_values[k];
    sys.G[i] = w_values[k];
  }
}

std::pair<Vector, Vector> neumann_loads(const BcSpec& bc, const Assembler& assembler, double t, double gamma,
                                        const PointwiseCoefficient* mobility) {
  if (!bc.u_flux || !bc.w_flux) {
    throw std::invalid_argument("neumann_loads: flux functions for u and w are required");
  }
  Vector f = assembler.boundary_load([&](Point x, Point n) { return bc.w_flux(x, t, n); }, mobility);
  Vector g = assembler.boundary_load([&](Point x, Point n) { return bc.u_flux(x, t, n); }, nullptr);
  return {std::move(f), -gamma * g};
}

void apply_bcs(BlockSystem& system, const BcSpec& bc, const Assembler& assembler, double t, double gamma,
               const PointwiseCoefficient* mobility) {
  switch (bc.kind) {
    case BcKind::noflux:
      return;
    case BcKind::neumann: {
      auto [f, g] = neumann_loads(bc, assembler, t, gamma, mobility);
      system.F += f;
      system.G += g;
      return;
    }
    case BcKind::dirichlet: {
      if (!bc.u_value || !bc.w_value) {
        throw std::invalid_argument("apply_bcs: Dirichlet values for u and w are required");
      }
      const FeSpace& space = assembler.space();
      const auto& dofs = space.boundary_dofs();
      std::vector<double> gu(dofs.size());
      std::vector<double> gw(dofs.size());
      for (std::size_t k = 0; k < dofs.size(); ++k) {
        const Point x = space.dof_coords()[dofs[k]];
        gu[k] = bc.u_value(x, t);
        gw[k] = bc.w_value(x, t);
        if (!std::isfinite(gu[k]) || !std::isfinite(gw[k])) {
          std::ostringstream msg;
          msg << "apply_bcs: non-finite Dirichlet value at (" << x.x << ", " << x.y << ")";
          throw std::domain_error(msg.str());
        }
      }
      apply_dirichlet(system, dofs, gu, gw);
      return;
    }
  }
}

BcKind parse_bc_kind(const std::string& name) {
  if (name == "noflux" || name == "no_flux") {
    return BcKind::noflux;
  }
  if (name == "dirichlet") {
    return BcKind::dirichlet;
  }
  if (name == "neumann") {
    return BcKind::neumann;
  }
  throw std::invalid_argument("unknown boundary condition '" + name + "'");
}

std::string to_string(BcKind k) {
  switch (k) {
    case BcKind::dirichlet:
      return "dirichlet";
    case BcKind::neumann:
      return "neumann";
    case BcKind::noflux:
      break;
  }
  return "noflux";
}

}  // namespace chfem
