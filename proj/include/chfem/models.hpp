#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chfem/assembly.hpp"

namespace chfem {

using ScalarMap = std::function<double(double)>;
using GradFn = std::function<std::array<double, 2>(Point, double)>;

struct Mobility {
  std::string name;
  ScalarMap f;
  /// f'(u); used by the fully implicit Newton baseline.
  ScalarMap df;
};

struct Energy {
  std::string name;
  ScalarMap phi;
  ScalarMap dphi;
  ScalarMap d2phi;
};

/// Closed-form solution (u, w) with gradients, for error measurement and
/// boundary data.
struct ExactSolution {
  SpaceTimeFn u;
  SpaceTimeFn w;
  GradFn grad_u;
  GradFn grad_w;
};

/// du/dt * time_scale = div(f(u) grad w) + S,  w = -gamma lap u + phi'(u) - spatial_energy(x).
struct ProblemModel {
  std::string name;
  double gamma = 1.0;
  Mobility mobility;
  Energy energy;
  /// Optional source S(x, t) of the first equation.
  SpaceTimeFn source;
  /// Optional term subtracted from the chemical potential (epsilon * rho for
  /// electrowetting).
  ScalarFn spatial_energy;
  double time_scale = 1.0;
  BcSpec bc;
  std::optional<ExactSolution> exact;
};

// Mobilities and energies.
Mobility constant_mobility(double c = 1.0);
Mobility linear_mobility();
/// f(u) = 1 - u^2.
Mobility binary_mobility();
/// f(u) = u^5 / (xi u + u^4), with f(0) = 0.
Mobility regularized_mobility(double xi);
Energy zero_energy();
/// u^4/4 - u^2/2.
Energy double_well_energy();
/// (u^2 - 1)^2 / (4 eps^2).
Energy scaled_double_well_energy(double eps);
/// (u - eps)^2 (u - 1)^2.
Energy wetting_energy(double eps);
/// a/2 u^2 + b u; handy for linear test problems.
Energy quadratic_energy(double a, double b = 0.0);

struct ManufacturedCase {
  double alpha = 2.0;
  double gamma = 1e-4;
};

double manufactured_u(const ManufacturedCase& c, double x, double t);
double manufactured_w(const ManufacturedCase& c, double x, double t);
double manufactured_S(const ManufacturedCase& c, double x, double t);
double manufactured_du_dx(const ManufacturedCase& c, double x, double t);
double manufactured_dw_dx(const ManufacturedCase& c, double x, double t);

/// Compactly supported source-type solution of u_t + div(u grad lap u) = 0.
/// The support radius is L t^(1/6).
struct SelfSimilarCase {
  double L = 3.0;
  double t0 = 0.001;
};

double selfsimilar_u(const SelfSimilarCase& c, double x, double y, double t);
double selfsimilar_w(const SelfSimilarCase& c, double x, double y, double t);
std::array<double, 2> selfsimilar_grad_u(const SelfSimilarCase& c, double x, double y, double t);
std::array<double, 2> selfsimilar_grad_w(const SelfSimilarCase& c, double x, double y, double t);

struct LubricationCase {
  double delta = 0.01;
  double sigma = 80.0;
  double C = 2.0;
};

struct SpinodalCase {
  double eps = 0.03;
  double mean = 0.0;
  std::size_t bumps = 1000;
  double amplitude = 0.01;
  double bump_rate = 1000.0;
  std::uint64_t seed = 20240601;
  Rect domain{0.0, 1.0, 0.0, 1.0};
};

enum class WettingLayout { translate, split };

struct ElectrowettingCase {
  double eps = 0.0427;
  double lambda = 0.75;
  WettingLayout layout = WettingLayout::translate;
  /// Droplet center; precursor film delta = eps.
  Point center{0.0, -0.3};
};

ElectrowettingCase electrowetting_translate_case(double lambda = 0.75);
ElectrowettingCase electrowetting_split_case(double lambda = 2.0);
/// rho = lambda * chi(x).
double electrowetting_rho(const ElectrowettingCase& c, Point x);

ProblemModel manufactured_model(const ManufacturedCase& c, BcKind bc);
ProblemModel selfsimilar_model(const SelfSimilarCase& c, BcKind bc);
ProblemModel lubrication_model();
ProblemModel regularized_lubrication_model(double xi);
ProblemModel spinodal_model(double eps);
ProblemModel electrowetting_model(const ElectrowettingCase& c);

/// Boundary data for the given kind taken from an exact solution.
BcSpec exact_bc(BcKind kind, const ExactSolution& exact);

/// Catalog of the named problems with their default parameters.
std::map<std::string, ProblemModel> standard_models();
/// Throws std::invalid_argument for unknown names.
ProblemModel find_model(const std::string& name);

/// splitmix64 generator; portable and bit-reproducible.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

/// delta + C exp(-sigma |x|^2).
ScalarFn lubrication_initial(const LubricationCase& c);

/// mean + sum_i c_i exp(-rate |x - a_i|^2) with seeded random centers a_i in
/// the domain, drawn first, then amplitudes c_i in [-amplitude, amplitude].
struct SpinodalInitial {
  explicit SpinodalInitial(const SpinodalCase& c);
  double operator()(Point x) const;

  double mean;
  double rate;
  std::vector<Point> centers;
  std::vector<double> amplitudes;
};

/// delta + exp(-10 |x - a|^2) with delta = eps.
ScalarFn electrowetting_initial(const ElectrowettingCase& c);

}  // namespace chfem
