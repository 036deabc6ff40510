#include "chfem/fe_space.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace chfem {

namespace {

// Adds the three rotations of (1 - 2a, a, a).
void add_orbit3(QuadratureRule& r, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  r.points.push_back({b, a, a});
  r.points.push_back({a, b, a});
  r.points.push_back({a, a, b});
  r.weights.insert(r.weights.end(), 3, w);
}

// Adds the six permutations of (a, b, 1 - a - b).
void add_orbit6(QuadratureRule& r, double a, double b, double w) {
  const double c = 1.0 - a - b;
  const std::array<Barycentric, 6> perms{{{a, b, c}, {a, c, b}, {b, a, c}, {b, c, a}, {c, a, b}, {c, b, a}}};
  for (const auto& p : perms) {
    r.points.push_back(p);
  }
  r.weights.insert(r.weights.end(), 6, w);
}

}  // namespace

QuadratureRule quadrature_for(int degree) {
  QuadratureRule r;
  switch (degree) {
    case 0:
    case 1:
      r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
      r.weights.push_back(1.0);
      r.degree = 1;
      break;
    case 2:
      add_orbit3(r, 1.0 / 6.0, 1.0 / 3.0);
      r.degree = 2;
      break;
    case 3:
    case 4:
      // The 4-point degree-3 rule has a negative weight; use the 6-point rule.
      add_orbit3(r, 0.44594849091596488631832925388305, 0.22338158967801146569500700843312);
      add_orbit3(r, 0.091576213509770743459571463402202, 0.10995174365532186763832632490021);
      r.degree = 4;
      break;
    case 5:
      r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
      r.weights.push_back(0.225);
      add_orbit3(r, 0.47014206410511508977044120951345, 0.13239415278850618073764938783315);
      add_orbit3(r, 0.10128650732345633880098736191512, 0.12593918054482715259568394550018);
      r.degree = 5;
      break;
    case 6:
      add_orbit3(r, 0.063089014491502228340331602870819, 0.050844906370206816920936809106869);
      add_orbit3(r, 0.24928674517091042129163855310702, 0.11678627572637936602528961138558);
      add_orbit6(r, 0.053145049844816947353249671631398, 0.31035245103378440541660773395655,
                 0.082851075618373575193553456420442);
      r.degree = 6;
      break;
    default:
      throw std::invalid_argument("quadrature_for: unsupported degree " + std::to_string(degree));
  }
  return r;
}

EdgeQuadrature edge_gauss3() {
  const double d = 0.5 * std::sqrt(0.6);
  return {{0.5 - d, 0.5, 0.5 + d}, {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0}};
}

BasisValues eval_basis(int degree, const Barycentric& b) {
  static constexpr std::array<std::array<double, 2>, 3> dl{{{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}}};
  BasisValues out;
  if (degree == 1) {
    out.count = 3;
    for (std::size_t i = 0; i < 3; ++i) {
      out.values[i] = b[i];
      out.grads[i] = dl[i];
    }
    return out;
  }
  if (degree != 2) {
    throw std::invalid_argument("eval_basis: unsupported degree " + std::to_string(degree));
  }
  out.count = 6;
  for (std::size_t i = 0; i < 3; ++i) {
    out.values[i] = b[i] * (2.0 * b[i] - 1.0);
    const double s = 4.0 * b[i] - 1.0;
    out.grads[i] = {s * dl[i][0], s * dl[i][1]};
  }
  static constexpr std::array<std::pair<std::size_t, std::size_t>, 3> edges{{{1, 2}, {2, 0}, {0, 1}}};
  for (std::size_t e = 0; e < 3; ++e) {
    const auto [i, j] = edges[e];
    out.values[3 + e] = 4.0 * b[i] * b[j];
    out.grads[3 + e] = {4.0 * (b[j] * dl[i][0] + b[i] * dl[j][0]),
                        4.0 * (b[j] * dl[i][1] + b[i] * dl[j][1])};
  }
  return out;
}

Point CellGeometry::map(const Barycentric& b) const {
  return {origin.x + jac[0][0] * b[1] + jac[0][1] * b[2], origin.y + jac[1][0] * b[1] + jac[1][1] * b[2]};
}

std::array<double, 2> CellGeometry::physical_grad(const std::array<double, 2>& ref) const {
  return {inv_jac_t[0][0] * ref[0] + inv_jac_t[0][1] * ref[1],
          inv_jac_t[1][0] * ref[0] + inv_jac_t[1][1] * ref[1]};
}

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh, int degree) : mesh_(std::move(mesh)), degree_(degree) {
  if (degree != 1 && degree != 2) {
    throw std::invalid_argument("build_space: unsupported degree " + std::to_string(degree));
  }
  const Mesh& m = *mesh_;
  local_ = degree == 1 ? 3 : 6;
  const std::size_t nv = m.num_vertices();
  dof_coords_ = m.vertices();

  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_index;
  if (degree == 2) {
    for (const auto& tri : m.triangles()) {
      for (std::size_t e = 0; e < 3; ++e) {
        const std::size_t a = tri[(e + 1) % 3];
        const std::size_t b = tri[(e + 2) % 3];
        edge_index.emplace(std::minmax(a, b), 0);
      }
    }
    std::size_t next = nv;
    dof_coords_.reserve(nv + edge_index.size());
    for (auto& [key, idx] : edge_index) {
      idx = next++;
      const Point pa = m.vertex(key.first);
      const Point pb = m.vertex(key.second);
      dof_coords_.push_back({0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)});
    }
  }

  cell_dofs_.reserve(m.num_triangles() * local_);
  geometry_.reserve(m.num_triangles());
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles()[t];
    cell_dofs_.insert(cell_dofs_.end(), tri.begin(), tri.end());
    if (degree == 2) {
      // Local edge e is opposite vertex e.
      for (std::size_t e = 0; e < 3; ++e) {
        cell_dofs_.push_back(edge_index.at(std::minmax(tri[(e + 1) % 3], tri[(e + 2) % 3])));
      }
    }
    const auto [p0, p1, p2] = m.triangle_points(t);
    CellGeometry g;
    g.origin = p0;
    g.jac = {{{p1.x - p0.x, p2.x - p0.x}, {p1.y - p0.y, p2.y - p0.y}}};
    const double det = g.jac[0][0] * g.jac[1][1] - g.jac[0][1] * g.jac[1][0];
    g.area = 0.5 * det;
    g.inv_jac_t = {{{g.jac[1][1] / det, -g.jac[1][0] / det}, {-g.jac[0][1] / det, g.jac[0][0] / det}}};
    geometry_.push_back(g);
  }

  for (const auto& e : m.boundary_edges()) {
    BoundaryFace f;
    f.side = e.side;
    f.a = m.vertex(e.vertices[0]);
    f.b = m.vertex(e.vertices[1]);
    f.dofs[0] = e.vertices[0];
    f.dofs[1] = e.vertices[1];
    f.count = 2;
    if (degree == 2) {
      f.dofs[2] = edge_index.at(std::minmax(e.vertices[0], e.vertices[1]));
      f.count = 3;
    }
    boundary_faces_.push_back(f);
    boundary_dofs_.insert(boundary_dofs_.end(), f.dofs.begin(), f.dofs.begin() + static_cast<long>(f.count));
  }
  std::sort(boundary_dofs_.begin(), boundary_dofs_.end());
  boundary_dofs_.erase(std::unique(boundary_dofs_.begin(), boundary_dofs_.end()), boundary_dofs_.end());
}

std::shared_ptr<const FeSpace> build_space(std::shared_ptr<const Mesh> mesh, int degree) {
  return std::make_shared<const FeSpace>(std::move(mesh), degree);
}

Field::Field(std::shared_ptr<const FeSpace> space)
    : space_(std::move(space)), coeffs_(Vector::Zero(static_cast<Eigen::Index>(space_->ndof()))) {}

Field::Field(std::shared_ptr<const FeSpace> space, Vector coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (static_cast<std::size_t>(coeffs_.size()) != space_->ndof()) {
    throw std::invalid_argument("Field: coefficient count " + std::to_string(coeffs_.size()) +
                                " does not match ndof " + std::to_string(space_->ndof()));
  }
}

bool Field::all_finite() const { return coeffs_.allFinite(); }

Field interpolate(std::shared_ptr<const FeSpace> space, const ScalarFn& g) {
  Field out(space);
  const auto& coords = space->dof_coords();
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const double v = g(coords[i]);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "interpolate: non-finite value " << v << " at (" << coords[i].x << ", " << coords[i].y << ")";
      throw std::domain_error(msg.str());
    }
    out.coeffs()[static_cast<Eigen::Index>(i)] = v;
  }
  return out;
}

double eval_field(const Field& field, Point p) {
  const FeSpace& space = field.space();
  const auto cell = space.mesh().locate(p);
  if (!cell) {
    std::ostringstream msg;
    msg << "eval_field: point (" << p.x << ", " << p.y << ") is outside the mesh";
    throw std::out_of_range(msg.str());
  }
  const CellGeometry& g = space.geometry(*cell);
  // Invert the affine map: (xi, eta) = J^{-1} (p - origin); inv_jac_t is J^{-T}.
  const double rx = p.x - g.origin.x;
  const double ry = p.y - g.origin.y;
  const double xi = g.inv_jac_t[0][0] * rx + g.inv_jac_t[1][0] * ry;
  const double eta = g.inv_jac_t[0][1] * rx + g.inv_jac_t[1][1] * ry;
  const BasisValues bv = eval_basis(space.degree(), {1.0 - xi - eta, xi, eta});
  const auto dofs = space.cell_dofs(*cell);
  double v = 0.0;
  for (std::size_t i = 0; i < bv.count; ++i) {
    v += bv.values[i] * field.coeffs()[static_cast<Eigen::Index>(dofs[i])];
  }
  return v;
}

TabulatedBasis::TabulatedBasis(int degree, QuadratureRule r) : rule(std::move(r)) {
  at.reserve(rule.size());
  for (const auto& p : rule.points) {
    at.push_back(eval_basis(degree, p));
  }
  ndofs = at.empty() ? 0 : at.front().count;
}

CellValues::CellValues(const FeSpace& space, int quadrature_degree)
    : space_(space), table_(space.degree(), quadrature_for(quadrature_degree)) {
  jxw_.resize(table_.rule.size());
  points_.resize(table_.rule.size());
  grads_.resize(table_.rule.size());
}

void CellValues::reinit(std::size_t cell) {
  const CellGeometry& g = space_.geometry(cell);
  dofs_ = space_.cell_dofs(cell);
  for (std::size_t q = 0; q < table_.rule.size(); ++q) {
    jxw_[q] = g.area * table_.rule.weights[q];
    points_[q] = g.map(table_.rule.points[q]);
    for (std::size_t i = 0; i < table_.ndofs; ++i) {
      grads_[q][i] = g.physical_grad(table_.at[q].grads[i]);
    }
  }
}

double CellValues::value_of(const Vector& coeffs, std::size_t q) const {
  double v = 0.0;
  for (std::size_t i = 0; i < table_.ndofs; ++i) {
    v += table_.at[q].values[i] * coeffs[static_cast<Eigen::Index>(dofs_[i])];
  }
  return v;
}

std::array<double, 2> CellValues::grad_of(const Vector& coeffs, std::size_t q) const {
  std::array<double, 2> g{0.0, 0.0};
  for (std::size_t i = 0; i < table_.ndofs; ++i) {
    const double c = coeffs[static_cast<Eigen::Index>(dofs_[i])];
    g[0] += grads_[q][i][0] * c;
    g[1] += grads_[q][i][1] * c;
  }
  return g;
}

}  // namespace chfem
