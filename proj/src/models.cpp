#include "chfem/models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chfem {

namespace {
constexpr double kPi = std::numbers::pi;
}

Mobility constant_mobility(double c) {
  return {"constant", [c](double) { return c; }, [](double) { return 0.0; }};
}

Mobility linear_mobility() {
  return {"linear", [](double u) { return u; }, [](double) { return 1.0; }};
}

Mobility binary_mobility() {
  return {"binary", [](double u) { return 1.0 - u * u; }, [](double u) { return -2.0 * u; }};
}

Mobility regularized_mobility(double xi) {
  // u^5 / (xi u + u^4) = u^4 / (xi + u^3) away from u = 0.
  return {"regularized",
          [xi](double u) { return u == 0.0 ? 0.0 : std::pow(u, 4) / (xi + u * u * u); },
          [xi](double u) {
            const double u3 = u * u * u;
            const double d = xi + u3;
            return (4.0 * xi * u3 + u3 * u3) / (d * d);
          }};
}

Energy zero_energy() {
  const auto zero = [](double) { return 0.0; };
  return {"zero", zero, zero, zero};
}

Energy double_well_energy() {
  return {"double_well", [](double u) { return 0.25 * u * u * u * u - 0.5 * u * u; },
          [](double u) { return u * u * u - u; }, [](double u) { return 3.0 * u * u - 1.0; }};
}

Energy scaled_double_well_energy(double eps) {
  const double s = 1.0 / (eps * eps);
  return {"scaled_double_well",
          [s](double u) {
            const double a = u * u - 1.0;
            return 0.25 * s * a * a;
          },
          [s](double u) { return s * u * (u * u - 1.0); }, [s](double u) { return s * (3.0 * u * u - 1.0); }};
}

Energy wetting_energy(double eps) {
  return {"wetting",
          [eps](double u) {
            const double a = (u - eps) * (u - 1.0);
            return a * a;
          },
          [eps](double u) { return 2.0 * (u - eps) * (u - 1.0) * (2.0 * u - eps - 1.0); },
          [eps](double u) {
            const double a = u - eps;
            const double b = u - 1.0;
            return 2.0 * (b * b + 4.0 * a * b + a * a);
          }};
}

Energy quadratic_energy(double a, double b) {
  return {"quadratic", [a, b](double u) { return 0.5 * a * u * u + b * u; }, [a, b](double u) { return a * u + b; },
          [a](double) { return a; }};
}

double manufactured_u(const ManufacturedCase& c, double x, double t) {
  return (t + 1.0) * std::sin(c.alpha * kPi * x);
}

double manufactured_w(const ManufacturedCase& c, double x, double t) {
  const double a = c.alpha * kPi;
  const double s = std::sin(a * x);
  const double tp = t + 1.0;
  return c.gamma * tp * a * a * s + tp * tp * tp * s * s * s - tp * s;
}

double manufactured_S(const ManufacturedCase& c, double x, double t) {
  const double a = c.alpha * kPi;
  const double s = std::sin(a * x);
  const double co = std::cos(a * x);
  const double tp = t + 1.0;
  const double tp3 = tp * tp * tp;
  return s + 3.0 * tp3 * a * a * s * s * s + c.gamma * tp * a * a * a * a * s - tp * a * a * s -
         6.0 * tp3 * a * a * s * co * co;
}

double manufactured_du_dx(const ManufacturedCase& c, double x, double t) {
  const double a = c.alpha * kPi;
  return (t + 1.0) * a * std::cos(a * x);
}

double manufactured_dw_dx(const ManufacturedCase& c, double x, double t) {
  const double a = c.alpha * kPi;
  const double s = std::sin(a * x);
  const double co = std::cos(a * x);
  const double tp = t + 1.0;
  return c.gamma * tp * a * a * a * co + 3.0 * tp * tp * tp * s * s * a * co - tp * a * co;
}

double selfsimilar_u(const SelfSimilarCase& c, double x, double y, double t) {
  const double tau = std::cbrt(t);
  const double r2 = (x * x + y * y) / tau;
  const double L2 = c.L * c.L;
  if (r2 >= L2) {
    return 0.0;
  }
  const double d = L2 - r2;
  return d * d / (192.0 * tau);
}

double selfsimilar_w(const SelfSimilarCase& c, double x, double y, double t) {
  const double tau = std::cbrt(t);
  const double r2 = (x * x + y * y) / tau;
  const double L2 = c.L * c.L;
  if (r2 >= L2) {
    return 0.0;
  }
  return (L2 - 2.0 * r2) / (24.0 * tau * tau);
}

std::array<double, 2> selfsimilar_grad_u(const SelfSimilarCase& c, double x, double y, double t) {
  const double tau = std::cbrt(t);
  const double r2 = (x * x + y * y) / tau;
  const double L2 = c.L * c.L;
  if (r2 >= L2) {
    return {0.0, 0.0};
  }
  const double s = -(L2 - r2) / (48.0 * tau * tau);
  return {s * x, s * y};
}

std::array<double, 2> selfsimilar_grad_w(const SelfSimilarCase& c, double x, double y, double t) {
  const double tau = std::cbrt(t);
  const double r2 = (x * x + y * y) / tau;
  if (r2 >= c.L * c.L) {
    return {0.0, 0.0};
  }
  return {-x / (6.0 * t), -y / (6.0 * t)};
}

ElectrowettingCase electrowetting_translate_case(double lambda) {
  ElectrowettingCase c;
  c.lambda = lambda;
  c.layout = WettingLayout::translate;
  c.center = {0.0, -0.3};
  return c;
}

ElectrowettingCase electrowetting_split_case(double lambda) {
  ElectrowettingCase c;
  c.lambda = lambda;
  c.layout = WettingLayout::split;
  c.center = {0.0, 0.0};
  return c;
}

double electrowetting_rho(const ElectrowettingCase& c, Point x) {
  bool on = false;
  switch (c.layout) {
    case WettingLayout::translate:
      on = x.y > 0.0;
      break;
    case WettingLayout::split:
      on = x.y < -0.3 || x.y > 0.3;
      break;
  }
  return on ? c.lambda : 0.0;
}

BcSpec exact_bc(BcKind kind, const ExactSolution& exact) {
  BcSpec bc;
  bc.kind = kind;
  if (kind == BcKind::dirichlet) {
    bc.u_value = exact.u;
    bc.w_value = exact.w;
  } else if (kind == BcKind::neumann) {
    const auto gu = exact.grad_u;
    const auto gw = exact.grad_w;
    bc.u_flux = [gu](Point x, double t, Point n) {
      const auto g = gu(x, t);
      return g[0] * n.x + g[1] * n.y;
    };
    bc.w_flux = [gw](Point x, double t, Point n) {
      const auto g = gw(x, t);
      return g[0] * n.x + g[1] * n.y;
    };
  }
  return bc;
}

ProblemModel manufactured_model(const ManufacturedCase& c, BcKind bc) {
  ProblemModel m;
  m.name = "manufactured";
  m.gamma = c.gamma;
  m.mobility = constant_mobility(1.0);
  m.energy = double_well_energy();
  m.source = [c](Point x, double t) { return manufactured_S(c, x.x, t); };
  ExactSolution ex;
  ex.u = [c](Point x, double t) { return manufactured_u(c, x.x, t); };
  ex.w = [c](Point x, double t) { return manufactured_w(c, x.x, t); };
  ex.grad_u = [c](Point x, double t) { return std::array<double, 2>{manufactured_du_dx(c, x.x, t), 0.0}; };
  ex.grad_w = [c](Point x, double t) { return std::array<double, 2>{manufactured_dw_dx(c, x.x, t), 0.0}; };
  m.bc = exact_bc(bc, ex);
  m.exact = std::move(ex);
  return m;
}

ProblemModel selfsimilar_model(const SelfSimilarCase& c, BcKind bc) {
  ProblemModel m;
  m.name = "selfsimilar";
  m.gamma = 1.0;
  m.mobility = linear_mobility();
  m.energy = zero_energy();
  ExactSolution ex;
  ex.u = [c](Point x, double t) { return selfsimilar_u(c, x.x, x.y, t); };
  ex.w = [c](Point x, double t) { return selfsimilar_w(c, x.x, x.y, t); };
  ex.grad_u = [c](Point x, double t) { return selfsimilar_grad_u(c, x.x, x.y, t); };
  ex.grad_w = [c](Point x, double t) { return selfsimilar_grad_w(c, x.x, x.y, t); };
  m.bc = exact_bc(bc, ex);
  m.exact = std::move(ex);
  return m;
}

ProblemModel lubrication_model() {
  ProblemModel m;
  m.name = "lubrication";
  m.gamma = 1.0;
  m.mobility = linear_mobility();
  m.energy = zero_energy();
  return m;
}

ProblemModel regularized_lubrication_model(double xi) {
  ProblemModel m = lubrication_model();
  m.name = "lubrication_regularized";
  m.mobility = regularized_mobility(xi);
  return m;
}

ProblemModel spinodal_model(double eps) {
  ProblemModel m;
  m.name = "spinodal";
  m.gamma = 1.0;
  m.mobility = binary_mobility();
  m.energy = scaled_double_well_energy(eps);
  return m;
}

ProblemModel electrowetting_model(const ElectrowettingCase& c) {
  ProblemModel m;
  m.name = c.layout == WettingLayout::translate ? "electrowetting_translate" : "electrowetting_split";
  m.gamma = c.eps * c.eps;
  m.mobility = linear_mobility();
  m.energy = wetting_energy(c.eps);
  m.time_scale = c.eps;
  m.spatial_energy = [c](Point x) { return c.eps * electrowetting_rho(c, x); };
  return m;
}

std::map<std::string, ProblemModel> standard_models() {
  std::map<std::string, ProblemModel> out;
  out.emplace("manufactured", manufactured_model({}, BcKind::dirichlet));
  out.emplace("selfsimilar", selfsimilar_model({}, BcKind::dirichlet));
  out.emplace("lubrication", lubrication_model());
  out.emplace("lubrication_regularized", regularized_lubrication_model(1e-3));
  out.emplace("spinodal", spinodal_model(0.03));
  out.emplace("electrowetting_translate", electrowetting_model(electrowetting_translate_case()));
  out.emplace("electrowetting_split", electrowetting_model(electrowetting_split_case()));
  return out;
}

ProblemModel find_model(const std::string& name) {
  auto models = standard_models();
  const auto it = models.find(name);
  if (it == models.end()) {
    throw std::invalid_argument("unknown model '" + name + "'");
  }
  return it->second;
}

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

ScalarFn lubrication_initial(const LubricationCase& c) {
  return [c](Point x) { return c.delta + c.C * std::exp(-c.sigma * (x.x * x.x + x.y * x.y)); };
}

SpinodalInitial::SpinodalInitial(const SpinodalCase& c) : mean(c.mean), rate(c.bump_rate) {
  SplitMix64 rng(c.seed);
  centers.reserve(c.bumps);
  for (std::size_t i = 0; i < c.bumps; ++i) {
    const double x = rng.uniform(c.domain.xmin, c.domain.xmax);
    const double y = rng.uniform(c.domain.ymin, c.domain.ymax);
    centers.push_back({x, y});
  }
  amplitudes.reserve(c.bumps);
  for (std::size_t i = 0; i < c.bumps; ++i) {
    amplitudes.push_back(rng.uniform(-c.amplitude, c.amplitude));
  }
}

double SpinodalInitial::operator()(Point x) const {
  double v = mean;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double dx = x.x - centers[i].x;
    const double dy = x.y - centers[i].y;
    v += amplitudes[i] * std::exp(-rate * (dx * dx + dy * dy));
  }
  return v;
}

ScalarFn electrowetting_initial(const ElectrowettingCase& c) {
  return [c](Point x) {
    const double dx = x.x - c.center.x;
    const double dy = x.y - c.center.y;
    return c.eps + std::exp(-10.0 * (dx * dx + dy * dy));
  };
}

}  // namespace chfem
