#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "chfem/diagnostics.hpp"
#include "chfem/stepper.hpp"

using namespace chfem;

namespace {

std::shared_ptr<const FeSpace> space_on(Rect r, long nx, long ny, int degree) {
  return build_space(std::make_shared<const Mesh>(r, nx, ny), degree);
}

ProblemModel plain(Energy e, double gamma) {
  ProblemModel m;
  m.gamma = gamma;
  m.mobility = constant_mobility();
  m.energy = std::move(e);
  return m;
}

}  // namespace

TEST_CASE("error norms of reproduced polynomials") {
  for (int k : {1, 2}) {
    const auto s = space_on({0, 1, 0, 1}, 3, 3, k);
    const auto g = [k](Point p, double) { return k == 1 ? 2 * p.x - p.y + 1 : p.x * p.x + p.x * p.y - p.y; };
    const auto dg = [k](Point p, double) {
      return k == 1 ? std::array<double, 2>{2, -1} : std::array<double, 2>{2 * p.x + p.y, p.x - 1};
    };
    const Field f = interpolate(s, [&](Point p) { return g(p, 0.0); });
    const ErrorReport e = error_norms(f, g, dg, 0.0);
    CHECK(e.l2 < 1e-12);
    CHECK(e.h1 < 1e-12);
    CHECK(e.linf < 1e-12);
  }
}

TEST_CASE("error norms of a zero field") {
  const auto s = space_on({0, 1, 0, 1}, 2, 2, 1);
  const ErrorReport e = error_norms(
      Field(s), [](Point, double) { return 1.0; }, [](Point, double) { return std::array<double, 2>{0, 0}; }, 0.0);
  CHECK(e.l2 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.h1 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.h1_seminorm == 0.0);
  CHECK(e.linf == doctest::Approx(1.0));
}

TEST_CASE("interpolant reference") {
  const auto s = space_on({0, 1, 0, 1}, 4, 4, 1);
  const auto g = [](Point p, double) { return std::sin(3 * p.x) * p.y; };
  const auto dg = [](Point p, double) { return std::array<double, 2>{3 * std::cos(3 * p.x) * p.y, std::sin(3 * p.x)}; };
  const Field f = interpolate(s, [&](Point p) { return g(p, 0.0); });
  ErrorOptions o;
  o.value_reference = ErrorReference::interpolant;
  o.gradient_reference = ErrorReference::interpolant;
  const ErrorReport e = error_norms(f, g, dg, 0.0, o);
  CHECK(e.l2 < 1e-14);
  CHECK(e.h1 < 1e-13);
  const ErrorReport x = error_norms(f, g, dg, 0.0);
  CHECK(x.l2 > 1e-4);
}

TEST_CASE("self-similar drop error on 25x25 P1") {
  // 100 steps of 1e-8 from t0 = 1e-3 with Dirichlet data
  const SelfSimilarCase c;
  const auto s = space_on({-0.5, 0.5, -0.5, 0.5}, 25, 25, 1);
  const ProblemModel m = selfsimilar_model(c, BcKind::dirichlet);
  const Field u0 = interpolate(s, [&](Point p) { return selfsimilar_u(c, p.x, p.y, c.t0); });
  RunOptions o;
  o.dt = 1e-8;
  o.t_start = c.t0;
  o.num_steps = 100;
  const Trajectory tr = run(m, u0, o);
  ErrorOptions eo;
  eo.value_reference = ErrorReference::interpolant;
  const ErrorReport e = error_norms(tr.u, m.exact->u, m.exact->grad_u, tr.t, eo);
  CHECK(e.l2 == doctest::Approx(1.44e-5).epsilon(0.1));
  CHECK(e.h1_seminorm == doctest::Approx(0.2234).epsilon(0.1));
}

TEST_CASE("energy") {
  const auto s = space_on({0, 1, 0, 1}, 4, 4, 2);
  CHECK(discrete_energy(interpolate(s, [](Point) { return 1.0; }), plain(double_well_energy(), 1.0)) ==
        doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(discrete_energy(Field(s), plain(zero_energy(), 1.0)) == 0.0);
  const auto p1 = space_on({0, 1, 0, 1}, 4, 4, 1);
  CHECK(discrete_energy(interpolate(p1, [](Point p) { return p.x; }), plain(zero_energy(), 1.0)) ==
        doctest::Approx(0.5).epsilon(1e-14));
  ProblemModel rho = plain(zero_energy(), 0.0);
  rho.spatial_energy = [](Point p) { return p.y > 0.5 ? 2.0 : 0.0; };
  CHECK(discrete_energy(interpolate(s, [](Point) { return 1.0; }), rho) == doctest::Approx(-1.0).epsilon(1e-2));
}

TEST_CASE("mass and norms") {
  const auto s = space_on({0, 1, 0, 1}, 3, 3, 1);
  CHECK(total_mass(interpolate(s, [](Point) { return 2.5; })) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(l2_norm(interpolate(s, [](Point) { return 3.0; })) == doctest::Approx(3.0).epsilon(1e-14));
  const Field a = interpolate(s, [](Point p) { return p.x; });
  const Field b = interpolate(s, [](Point p) { return p.x + 1; });
  CHECK(l2_distance(a, b) == doctest::Approx(1.0).epsilon(1e-14));
  const auto other = space_on({0, 1, 0, 1}, 2, 2, 1);
  CHECK_THROWS_AS(l2_distance(a, Field(other)), std::invalid_argument);

  const auto lub = space_on({-0.5, 0.5, -1, 1}, 70, 140, 1);
  const Field u0 = interpolate(lub, lubrication_initial({}));
  CHECK(std::abs(total_mass(u0) - 0.09854) < 2e-4);
  CHECK(droplet_height(u0) == doctest::Approx(2.01).epsilon(1e-14));
  CHECK(droplet_height(interpolate(lub, [](Point) { return 0.3; }), {0.2, -0.4}) == doctest::Approx(0.3));
  CHECK_THROWS_AS(droplet_height(u0, {3.0, 0.0}), std::out_of_range);
}

TEST_CASE("flat late state") {
  // long lubrication run on a coarse mesh relaxes towards mass / area
  const auto s = space_on({-0.5, 0.5, -1, 1}, 10, 20, 1);
  const Field u0 = interpolate(s, [](Point p) { return 0.5 + 0.2 * std::cos(std::acos(-1.0) * p.y); });
  RunOptions o;
  o.dt = 5e-3;
  o.num_steps = 200;
  const Trajectory tr = run(lubrication_model(), u0, o);
  CHECK(droplet_height(tr.u) == doctest::Approx(total_mass(tr.u) / 2.0).epsilon(0.01));
}

TEST_CASE("observed order") {
  auto t = observed_order({{1, 0.223426, {}}, {0.5, 0.111751, {}}}, 2.0);
  CHECK(*t.rows[0].order == doctest::Approx(0.9995).epsilon(1e-4));
  CHECK_FALSE(t.rows[1].order.has_value());
  t = observed_order({{1, 14.4303e-6, {}}, {0.5, 3.64952e-6, {}}}, 2.0);
  CHECK(*t.rows[0].order == doctest::Approx(1.983).epsilon(1e-3));
  t = observed_order({{1, 4e-3, {}}, {0.5, 1e-3, {}}, {0.25, 2.5e-4, {}}}, 2.0);
  CHECK(*t.rows[0].order == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(*t.rows[1].order == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(t.refinement == 2.0);
  CHECK_THROWS_AS(observed_order({{1, 1e-3, {}}}, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(observed_order({{1, 1e-3, {}}, {0.5, 1e-4, {}}}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(observed_order({{1, 1e-3, {}}, {0.5, 0.0, {}}}, 2.0), std::domain_error);
  CHECK_THROWS_AS(observed_order({{1, -1e-3, {}}, {0.5, 1e-4, {}}}, 2.0), std::domain_error);
}
