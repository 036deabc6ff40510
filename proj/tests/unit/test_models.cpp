#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chfem/models.hpp"

using namespace chfem;

TEST_CASE("manufactured solution values") {
  const ManufacturedCase c;
  const double pi = std::numbers::pi;
  CHECK(manufactured_u(c, 0.25, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(manufactured_w(c, 0.25, 0.0) == doctest::Approx(4 * pi * pi * 1e-4).epsilon(1e-12));
  CHECK(manufactured_w(c, 0.25, 0.0) == doctest::Approx(3.94784e-3).epsilon(1e-5));
  CHECK(manufactured_S(c, 0.25, 0.0) == doctest::Approx(80.1127).epsilon(1e-5));
  CHECK(manufactured_du_dx(c, 0.0, 0.0) == doctest::Approx(2 * pi).epsilon(1e-14));
}

TEST_CASE("self-similar solution values") {
  const SelfSimilarCase c;
  CHECK(selfsimilar_u(c, 0, 0, 0.001) == doctest::Approx(4.21875).epsilon(1e-13));
  CHECK(selfsimilar_w(c, 0, 0, 0.001) == doctest::Approx(37.5).epsilon(1e-13));
  const double radius = c.L * std::pow(0.001, 1.0 / 6.0);
  CHECK(selfsimilar_u(c, radius, 0, 0.001) == doctest::Approx(0.0));
  CHECK(selfsimilar_u(c, 0.0, radius * 1.01, 0.001) == 0.0);
  CHECK(selfsimilar_w(c, radius * 1.01, 0.0, 0.001) == 0.0);
  const auto g = selfsimilar_grad_u(c, radius * 1.1, 0.0, 0.001);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == 0.0);
}

TEST_CASE("energies") {
  const Energy dw = double_well_energy();
  CHECK(dw.dphi(1.0) == 0.0);
  CHECK(dw.dphi(-1.0) == 0.0);
  CHECK(dw.d2phi(1.0) == 2.0);
  CHECK(dw.d2phi(0.0) == -1.0);
  CHECK(dw.phi(1.0) == -0.25);

  const Energy sp = scaled_double_well_energy(0.03);
  CHECK(sp.phi(1.0) == 0.0);
  CHECK(sp.phi(-1.0) == 0.0);
  CHECK(sp.d2phi(0.0) == doctest::Approx(-1111.11).epsilon(1e-5));

  const Energy we = wetting_energy(0.0427);
  CHECK(we.phi(1.0) == 0.0);
  CHECK(we.phi(0.0427) == 0.0);
  CHECK(we.dphi(1.0) == 0.0);

  const Energy q = quadratic_energy(3.0, 1.0);
  CHECK(q.dphi(2.0) == 7.0);
  CHECK(q.d2phi(-5.0) == 3.0);
}

TEST_CASE("mobilities") {
  CHECK(binary_mobility().f(0.5) == 0.75);
  CHECK(binary_mobility().f(1.0) == 0.0);
  CHECK(linear_mobility().f(0.3) == 0.3);
  CHECK(constant_mobility(2.5).f(-7) == 2.5);
  const Mobility r = regularized_mobility(1e-3);
  CHECK(r.f(0.0) == 0.0);
  CHECK(r.f(1.0) == doctest::Approx(1.0 / 1.001).epsilon(1e-14));
  // close to u away from the degenerate end
  CHECK(r.f(0.5) == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("electrowetting layouts") {
  const ElectrowettingCase t = electrowetting_translate_case(0.75);
  CHECK(electrowetting_rho(t, {0.0, 0.5}) == 0.75);
  CHECK(electrowetting_rho(t, {0.0, -0.5}) == 0.0);
  const ElectrowettingCase s = electrowetting_split_case(2.0);
  CHECK(s.lambda == 2.0);
  CHECK(electrowetting_initial(t)(t.center) == doctest::Approx(1.0 + t.eps));
}

TEST_CASE("catalog") {
  const auto models = standard_models();
  for (const char* name : {"manufactured", "selfsimilar", "lubrication", "spinodal", "electrowetting_translate",
                           "electrowetting_split"}) {
    CAPTURE(name);
    CHECK(models.count(name) == 1);
  }
  CHECK(find_model("spinodal").energy.d2phi(0.0) == doctest::Approx(-1.0 / (0.03 * 0.03)));
  CHECK(find_model("manufactured").exact.has_value());
  CHECK_FALSE(find_model("lubrication").exact.has_value());
  CHECK(find_model("lubrication").mobility.name == "linear");
  CHECK(find_model("spinodal").mobility.name == "binary");
  CHECK(find_model("electrowetting_split").spatial_energy({0.0, 0.6}) ==
        doctest::Approx(0.0427 * 2.0).epsilon(1e-12));
  CHECK_THROWS_AS(find_model("nope"), std::invalid_argument);
}

TEST_CASE("initial conditions") {
  CHECK(lubrication_initial({})({0, 0}) == doctest::Approx(2.01).epsilon(1e-15));
  SpinodalCase sc;
  sc.bumps = 5;
  const SpinodalInitial a(sc);
  // a single bump equals one at its own center (up to its neighbours' tails)
  SpinodalCase one = sc;
  one.bumps = 1;
  one.amplitude = 1.0;
  one.mean = 0.0;
  const SpinodalInitial b(one);
  CHECK(std::abs(b(b.centers[0])) == doctest::Approx(std::abs(b.amplitudes[0])));
  CHECK(std::abs(b.amplitudes[0]) <= 1.0);
  for (const Point p : a.centers) {
    CHECK(sc.domain.contains(p));
  }
  const SpinodalInitial again(sc);
  CHECK(again.centers[3].x == a.centers[3].x);
  CHECK(again.amplitudes[4] == a.amplitudes[4]);
  sc.seed += 1;
  const SpinodalInitial other(sc);
  CHECK(other.centers[0].x != a.centers[0].x);
  SpinodalCase shifted;
  shifted.mean = 0.4;
  const SpinodalCase base;
  const Point p{0.3, 0.6};
  CHECK(SpinodalInitial(shifted)(p) - SpinodalInitial(base)(p) == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("splitmix64") {
  SplitMix64 r(0);
  // published first output of splitmix64 for seed 0
  CHECK(r.next() == 0xE220A8397B1DCDAFULL);
  SplitMix64 u(42);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("exact boundary data") {
  const ManufacturedCase c;
  const ProblemModel d = manufactured_model(c, BcKind::dirichlet);
  CHECK(d.bc.kind == BcKind::dirichlet);
  CHECK(d.bc.u_value({0.25, 0.1}, 0.0) == doctest::Approx(1.0));
  const ProblemModel n = manufactured_model(c, BcKind::neumann);
  CHECK(n.bc.u_flux({0.5, 0.0}, 0.0, {1, 0}) == doctest::Approx(manufactured_du_dx(c, 0.5, 0.0)));
  CHECK(n.bc.u_flux({0.0, 0.5}, 0.0, {0, 1}) == 0.0);
}
