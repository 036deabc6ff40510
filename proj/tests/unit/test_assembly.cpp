#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <numbers>

#include "chfem/assembly.hpp"
#include "chfem/linsolve.hpp"
#include "chfem/models.hpp"

using namespace chfem;
using Eigen::MatrixXd;

namespace {

std::shared_ptr<const FeSpace> space_on(Rect r, long nx, long ny, int degree) {
  return build_space(std::make_shared<const Mesh>(r, nx, ny), degree);
}

// Analytic element matrices scattered into a dense global matrix.
MatrixXd analytic_mass(const FeSpace& s) {
  const auto n = static_cast<Eigen::Index>(s.ndof());
  MatrixXd m = MatrixXd::Zero(n, n);
  for (std::size_t c = 0; c < s.num_cells(); ++c) {
    const auto d = s.cell_dofs(c);
    const double a = s.geometry(c).area;
    MatrixXd e(d.size(), d.size());
    if (s.degree() == 1) {
      e << 2, 1, 1, 1, 2, 1, 1, 1, 2;
      e *= a / 12.0;
    } else {
      // vertices 0..2, midpoints 3..5 with midpoint k+3 opposite vertex k
      e << 6, -1, -1, -4, 0, 0,  //
          -1, 6, -1, 0, -4, 0,   //
          -1, -1, 6, 0, 0, -4,   //
          -4, 0, 0, 32, 16, 16,  //
          0, -4, 0, 16, 32, 16,  //
          0, 0, -4, 16, 16, 32;
      e *= a / 180.0;
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (std::size_t j = 0; j < d.size(); ++j) {
        m(static_cast<Eigen::Index>(d[i]), static_cast<Eigen::Index>(d[j])) += e(i, j);
      }
    }
  }
  return m;
}

MatrixXd analytic_p1_stiffness(const FeSpace& s) {
  const auto n = static_cast<Eigen::Index>(s.ndof());
  MatrixXd k = MatrixXd::Zero(n, n);
  const auto& x = s.dof_coords();
  for (std::size_t c = 0; c < s.num_cells(); ++c) {
    const auto d = s.cell_dofs(c);
    const double a = s.geometry(c).area;
    std::array<double, 3> b{}, cc{};
    for (int i = 0; i < 3; ++i) {
      const Point pj = x[d[(i + 1) % 3]];
      const Point pk = x[d[(i + 2) % 3]];
      b[i] = pj.y - pk.y;
      cc[i] = pk.x - pj.x;
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        k(static_cast<Eigen::Index>(d[i]), static_cast<Eigen::Index>(d[j])) += (b[i] * b[j] + cc[i] * cc[j]) / (4 * a);
      }
    }
  }
  return k;
}

double max_abs(const MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("P1 element matrices on the reference triangle") {
  // the upper-left triangle of the 1x1 mesh is congruent to the reference one
  const auto s = space_on({0, 1, 0, 1}, 1, 1, 1);
  const MatrixXd m = MatrixXd(assemble_mass(s));
  const MatrixXd k = MatrixXd(assemble_stiffness(s));
  CHECK(max_abs(m - analytic_mass(*s)) < 1e-12);
  CHECK(max_abs(k - analytic_p1_stiffness(*s)) < 1e-12);
  // the second cell has unit legs
  const auto d = s->cell_dofs(1);
  const Point p0 = s->dof_coords()[d[0]];
  const Point p1 = s->dof_coords()[d[1]];
  const Point p2 = s->dof_coords()[d[2]];
  CHECK(std::abs((p1.x - p0.x) * (p2.y - p0.y) - (p1.y - p0.y) * (p2.x - p0.x)) == doctest::Approx(1.0));
}

TEST_CASE("element matrices vs analytic values") {
  for (const auto& [r, nx, ny] : {std::tuple{Rect{0, 1, 0, 1}, 2L, 2L}, std::tuple{Rect{-0.5, 1.5, 0.25, 1}, 3L, 2L}}) {
    const auto p1 = space_on(r, nx, ny, 1);
    CHECK(max_abs(MatrixXd(assemble_mass(p1)) - analytic_mass(*p1)) < 1e-12);
    CHECK(max_abs(MatrixXd(assemble_stiffness(p1)) - analytic_p1_stiffness(*p1)) < 1e-12);
    const auto p2 = space_on(r, nx, ny, 2);
    CHECK(max_abs(MatrixXd(assemble_mass(p2)) - analytic_mass(*p2)) < 1e-12);
  }
}

TEST_CASE("mass matrix properties") {
  for (int k : {1, 2}) {
    const auto s = space_on({0, 1, 0, 1}, 5, 3, k);
    const SparseMatrix m = assemble_mass(s);
    const Vector one = Vector::Ones(m.rows());
    CHECK(one.dot(m * one) == doctest::Approx(1.0).epsilon(1e-13));
    const Field fx = interpolate(s, [](Point p) { return p.x; });
    CHECK(fx.coeffs().dot(m * fx.coeffs()) == doctest::Approx(1.0 / 3).epsilon(1e-13));
  }
  const MatrixXd m = MatrixXd(assemble_mass(space_on({0, 1, 0, 1}, 2, 2, 1)));
  CHECK(max_abs(m - m.transpose()) == 0.0);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(m);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("stiffness matrix properties") {
  for (int k : {1, 2}) {
    const auto s = space_on({0, 2, 0, 1}, 4, 3, k);
    const SparseMatrix a = assemble_stiffness(s);
    const Vector one = Vector::Ones(a.rows());
    CHECK((a * one).cwiseAbs().maxCoeff() < 1e-12);
    const MatrixXd d = MatrixXd(a);
    CHECK(max_abs(d - d.transpose()) < 1e-14);
    const Field u = interpolate(s, [](Point p) { return p.x + 2 * p.y; });
    CHECK(u.coeffs().dot(a * u.coeffs()) == doctest::Approx(5.0 * 2.0).epsilon(1e-12));

    const Field two = interpolate(s, [](Point) { return 2.0; });
    const MatrixXd a2 = MatrixXd(assemble_stiffness(s, &two));
    CHECK(max_abs(a2 - 2.0 * d) < 1e-12);
    const MatrixXd a3 = MatrixXd(assemble_stiffness(s, nullptr, [](double v) { return 3.0 * v; }));
    CHECK(max_abs(a3 - 3.0 * d) < 1e-12);
    const MatrixXd a4 = MatrixXd(assemble_stiffness(s, &two, [](double v) { return v * v; }));
    CHECK(max_abs(a4 - 4.0 * d) < 1e-12);
  }
}

TEST_CASE("shared sparsity pattern") {
  const auto s = space_on({0, 1, 0, 1}, 3, 3, 2);
  const Assembler asmb(s);
  const SparseMatrix m = asmb.mass();
  const SparseMatrix k = asmb.stiffness();
  const SparseMatrix z = asmb.zero_matrix();
  CHECK(m.nonZeros() == k.nonZeros());
  CHECK(m.nonZeros() == z.nonZeros());
  CHECK(std::equal(m.innerIndexPtr(), m.innerIndexPtr() + m.nonZeros(), k.innerIndexPtr()));
}

TEST_CASE("linearized energy") {
  const auto s = space_on({0, 1, 0, 1}, 3, 3, 1);
  const Energy dw = double_well_energy();
  const MatrixXd m = MatrixXd(assemble_mass(s));
  const Vector one = Vector::Ones(static_cast<Eigen::Index>(s->ndof()));

  auto [j1, b1] = assemble_linearized_energy(s, interpolate(s, [](Point) { return 1.0; }), dw.dphi, dw.d2phi);
  CHECK(max_abs(MatrixXd(j1) - 2.0 * m) < 1e-12);
  CHECK((b1 + 2.0 * (m * one)).cwiseAbs().maxCoeff() < 1e-12);

  auto [j0, b0] = assemble_linearized_energy(s, Field(s), dw.dphi, dw.d2phi);
  CHECK(max_abs(MatrixXd(j0) + m) < 1e-12);
  CHECK(b0.cwiseAbs().maxCoeff() < 1e-14);

  const Energy z = zero_energy();
  auto [jz, bz] = assemble_linearized_energy(s, interpolate(s, [](Point p) { return p.x; }), z.dphi, z.d2phi);
  CHECK(max_abs(MatrixXd(jz)) == 0.0);
  CHECK(bz.cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(assemble_linearized_energy(s, Field(s), dw.dphi, [](double) { return std::nan(""); }),
                  std::domain_error);
}

TEST_CASE("source vectors") {
  const auto s = space_on({0, 1, 0, 1}, 4, 4, 2);
  CHECK(assemble_source(s, [](Point, double) { return 0.0; }, 0.0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(assemble_source(s, [](Point, double) { return 1.0; }, 0.0).sum() == doctest::Approx(1.0).epsilon(1e-13));

  const ManufacturedCase c;
  const double pi = std::numbers::pi;
  CHECK(manufactured_S(c, 0.25, 0.0) == doctest::Approx(1 + 8 * pi * pi + 0.0016 * std::pow(pi, 4)).epsilon(1e-12));
  CHECK(manufactured_S(c, 0.25, 0.0) == doctest::Approx(80.1127).epsilon(1e-5));
  const auto p2 = space_on({0, 1, 0, 1}, 8, 8, 2);
  const Vector b = assemble_source(p2, [c](Point p, double t) { return manufactured_S(c, p.x, t); }, 0.0);
  CHECK(b.size() == static_cast<Eigen::Index>(p2->ndof()));
  // sum of the loads is int S dx, here against a midpoint rule in x
  double ref = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    ref += manufactured_S(c, (i + 0.5) / n, 0.0) / n;
  }
  CHECK(b.sum() == doctest::Approx(ref).epsilon(1e-7));
}

TEST_CASE("boundary conditions") {
  const auto s = space_on({0, 1, 0, 1}, 2, 2, 1);
  const Assembler asmb(s);
  BlockSystem sys{asmb.mass(), asmb.stiffness(), asmb.stiffness(), asmb.mass(),
                  Vector::LinSpaced(static_cast<Eigen::Index>(s->ndof()), 0, 1),
                  Vector::LinSpaced(static_cast<Eigen::Index>(s->ndof()), 1, 2)};

  SUBCASE("no-flux leaves the system alone") {
    BlockSystem copy = sys;
    apply_bcs(copy, BcSpec{}, asmb, 0.0, 1.0);
    CHECK(max_abs(MatrixXd(copy.A1) - MatrixXd(sys.A1)) == 0.0);
    CHECK((copy.F - sys.F).cwiseAbs().maxCoeff() == 0.0);
    CHECK((copy.G - sys.G).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("homogeneous Neumann equals no-flux") {
    BlockSystem copy = sys;
    BcSpec bc;
    bc.kind = BcKind::neumann;
    bc.u_flux = [](Point, double, Point) { return 0.0; };
    bc.w_flux = [](Point, double, Point) { return 0.0; };
    apply_bcs(copy, bc, asmb, 0.0, 1.0);
    CHECK((copy.F - sys.F).cwiseAbs().maxCoeff() == 0.0);
    CHECK((copy.G - sys.G).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("Neumann load of a linear function") {
    BlockSystem copy = sys;
    BcSpec bc;
    bc.kind = BcKind::neumann;
    // u = x: du/dn = n_x; the boundary integral of n_x vanishes and the
    // weighted one against v = x equals the left/right difference
    bc.u_flux = [](Point, double, Point n) { return n.x; };
    bc.w_flux = [](Point, double, Point n) { return n.x; };
    apply_bcs(copy, bc, asmb, 0.0, 2.0);
    const Vector dg = copy.G - sys.G;
    const Vector df = copy.F - sys.F;
    CHECK(std::abs(dg.sum()) < 1e-14);
    const Field fx = interpolate(s, [](Point p) { return p.x; });
    CHECK(df.dot(fx.coeffs()) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(dg.dot(fx.coeffs()) == doctest::Approx(-2.0).epsilon(1e-13));
  }
  SUBCASE("Dirichlet on every node gives the interpolant") {
    const auto one = space_on({0, 1, 0, 1}, 1, 1, 1);
    const Assembler a1(one);
    BlockSystem small{a1.mass(), a1.stiffness(), a1.stiffness(), a1.mass(), Vector::Ones(4), Vector::Ones(4)};
    const ManufacturedCase c;
    const ProblemModel m = manufactured_model(c, BcKind::dirichlet);
    apply_bcs(small, m.bc, a1, 0.3, c.gamma);
    const MatrixXd k = MatrixXd(monolithic(small));
    Vector rhs(8);
    rhs << small.F, small.G;
    const Vector x = k.fullPivLu().solve(rhs);
    for (int i = 0; i < 4; ++i) {
      const Point p = one->dof_coords()[static_cast<std::size_t>(i)];
      CHECK(x[i] == doctest::Approx(manufactured_u(c, p.x, 0.3)).epsilon(1e-14));
      CHECK(x[4 + i] == doctest::Approx(manufactured_w(c, p.x, 0.3)).epsilon(1e-14));
    }
  }
  SUBCASE("missing data") {
    BcSpec bc;
    bc.kind = BcKind::dirichlet;
    CHECK_THROWS_AS(apply_bcs(sys, bc, asmb, 0.0, 1.0), std::invalid_argument);
    bc.kind = BcKind::neumann;
    CHECK_THROWS_AS(apply_bcs(sys, bc, asmb, 0.0, 1.0), std::invalid_argument);
  }
}

TEST_CASE("bc kind names") {
  CHECK(parse_bc_kind("dirichlet") == BcKind::dirichlet);
  CHECK(parse_bc_kind("no_flux") == BcKind::noflux);
  CHECK(to_string(BcKind::neumann) == "neumann");
  CHECK_THROWS_AS(parse_bc_kind("robin"), std::invalid_argument);
}

TEST_CASE("gradient coupling and weighted actions") {
  const auto s = space_on({0, 1, 0, 1}, 3, 3, 2);
  const Assembler asmb(s);
  const Field w = interpolate(s, [](Point p) { return p.x * p.x + p.y; });
  const Field u = interpolate(s, [](Point p) { return 1 + p.x * p.y; });
  const PointwiseCoefficient c{{&u}, [](std::span<const double> v, Point) { return v[0] * v[0]; }};
  const Vector act = asmb.weighted_stiffness_action(c, w);
  const Vector via = asmb.weighted_stiffness(c) * w.coeffs();
  CHECK((act - via).cwiseAbs().maxCoeff() < 1e-13);
  // finite difference of the action in u along direction d matches the coupling
  const Field d = interpolate(s, [](Point p) { return std::sin(p.x + 2 * p.y); });
  const PointwiseCoefficient dc{{&u}, [](std::span<const double> v, Point) { return 2 * v[0]; }};
  const Vector jd = asmb.gradient_coupling(dc, w) * d.coeffs();
  const double h = 1e-6;
  const Field up(s, u.coeffs() + h * d.coeffs());
  const Field um(s, u.coeffs() - h * d.coeffs());
  const PointwiseCoefficient cp{{&up}, [](std::span<const double> v, Point) { return v[0] * v[0]; }};
  const PointwiseCoefficient cm{{&um}, [](std::span<const double> v, Point) { return v[0] * v[0]; }};
  const Vector fd = (asmb.weighted_stiffness_action(cp, w) - asmb.weighted_stiffness_action(cm, w)) / (2 * h);
  CHECK((fd - jd).cwiseAbs().maxCoeff() < 1e-7);
}
