#include "degenwave/weight_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "degenwave/discretization.hpp"
#include "degenwave/error.hpp"

namespace degenwave {

namespace {

double radius_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

void require_regularized(const WeightParams& params, const char* what) {
  if (!(params.epsilon > 0.0)) {
    throw ConfigError(std::string(what) + " requires epsilon > 0; use the raw weight for epsilon = 0");
  }
}

}  // namespace

void WeightParams::validate() const {
  if (!(alpha >= kAlphaMin && alpha <= kAlphaMax)) {
    throw ConfigError("alpha must lie in [" + std::to_string(kAlphaMin) + ", " +
                      std::to_string(kAlphaMax) + "], got " + std::to_string(alpha));
  }
  if (dimension != 2 && dimension != 3) {
    throw ConfigError("dimension must be 2 or 3, got " + std::to_string(dimension));
  }
  if (!(half_width > 0.0)) throw ConfigError("half_width must be positive");
  if (!(R0 > 0.0) || !(8.0 * R0 < half_width)) {
    throw ConfigError("R0 must satisfy 0 < 8 R0 < L");
  }
  if (!(epsilon >= 0.0) || !(epsilon < 0.25 * half_width)) {
    throw ConfigError("epsilon must satisfy 0 <= epsilon < L/4, got " + std::to_string(epsilon));
  }
}

double WeightParams::sup_radius_plus_one() const {
  return std::sqrt(static_cast<double>(dimension)) * half_width + 1.0;
}

bool WeightParams::regularizer_in_reference_range() const {
  return epsilon > 0.0 && epsilon < R0;
}

double MultiplierConstants::weighted_observability_constant(double T, double) const {
  return 2.0 * (a * T - 2.0 * b) / theta;
}

double MultiplierConstants::observability_constant(double T, double alpha) const {
  return 2.0 * (a * T - 2.0 * b) / (theta * std::pow(M, 2.0 * alpha));
}

double psi(const WeightParams& params, double r) {
  require_regularized(params, "psi");
  if (r < 0.0) throw ConfigError("psi: radius must be nonnegative");
  const double e = params.epsilon;
  if (r >= e) return r;
  const double r2 = r * r;
  return 3.0 * e / 8.0 + 3.0 * r2 / (4.0 * e) - r2 * r2 / (8.0 * e * e * e);
}

double psi_prime(const WeightParams& params, double r) {
  require_regularized(params, "psi_prime");
  if (r < 0.0) throw ConfigError("psi_prime: radius must be nonnegative");
  const double e = params.epsilon;
  if (r >= e) return 1.0;
  return 3.0 * r / (2.0 * e) - r * r * r / (2.0 * e * e * e);
}

double psi_second(const WeightParams& params, double r) {
  require_regularized(params, "psi_second");
  if (r < 0.0) throw ConfigError("psi_second: radius must be nonnegative");
  const double e = params.epsilon;
  if (r >= e) return 0.0;
  return 3.0 / (2.0 * e) - 3.0 * r * r / (2.0 * e * e * e);
}

std::vector<double> psi_gradient(const WeightParams& params, std::span<const double> x) {
  require_regularized(params, "psi_gradient");
  const double e = params.epsilon;
  const double r = radius_of(x);
  std::vector<double> g(x.begin(), x.end());
  const double scale =
      r >= e ? 1.0 / r : 3.0 / (2.0 * e) - r * r / (2.0 * e * e * e);
  for (double& v : g) v *= scale;
  return g;
}

double radial_weight(const WeightParams& params, double r) {
  if (params.epsilon == 0.0) return std::pow(r, params.alpha);
  return std::pow(psi(params, r), params.alpha);
}

double weight(const WeightParams& params, std::span<const double> x) {
  return radial_weight(params, radius_of(x));
}

std::vector<double> weight_gradient(const WeightParams& params, std::span<const double> x) {
  require_regularized(params, "weight_gradient");
  const double p = psi(params, radius_of(x));
  const double factor = params.alpha * std::pow(p, params.alpha - 1.0);
  std::vector<double> g = psi_gradient(params, x);
  for (double& v : g) v *= factor;
  return g;
}

double radial_multiplier_factor(const WeightParams& params, double r) {
  require_regularized(params, "multiplier_factor");
  // x . grad psi = r psi'(r) for a radial profile.
  return 1.0 - 0.5 * params.alpha * r * psi_prime(params, r) / psi(params, r);
}

double multiplier_factor(const WeightParams& params, std::span<const double> x) {
  return radial_multiplier_factor(params, radius_of(x));
}

double multiplier_floor(double alpha) { return 0.375 * std::min(1.0, 2.0 - alpha); }

double quartic_floor(double alpha, double epsilon) {
  const double e4 = epsilon * epsilon * epsilon * epsilon;
  if (alpha <= 1.0) return e4 * std::min(3.0, 4.0 * (2.0 - alpha));
  return e4 * std::min(3.0, 3.0 / (2.0 * alpha - 1.0) * (3.0 * alpha - 2.0) * (2.0 - alpha));
}

MultiplierConstants constants(const WeightParams& params, const Grid& grid) {
  params.validate();
  if (grid.boundary().empty()) throw ConfigError("constants: grid has no boundary nodes");
  const int N = grid.dimension();
  MultiplierConstants k;
  k.a = multiplier_floor(params.alpha);
  k.hat_a = params.epsilon > 0.0 ? quartic_floor(params.alpha, params.epsilon) : 0.0;
  k.P = N - k.a;
  k.c = N * N - k.a * k.a;

  double b = 0.0;
  double sup_r = 0.0;
  for (const Point& x : grid.closed_nodes()) {
    const double r = norm(x, N);
    sup_r = std::max(sup_r, r);
    if (r == 0.0) continue;
    b = std::max(b, r / std::sqrt(radial_weight(params, r)));
  }
  k.b = b;
  k.M = sup_r + 1.0;

  double theta = 0.0;
  for (const BoundaryNode& node : grid.boundary()) {
    double xn = 0.0;
    for (int d = 0; d < N; ++d) xn += node.position[d] * node.normal[d];
    const double r = norm(node.position, N);
    theta = std::max(theta, xn / std::pow(r, params.alpha));
  }
  k.theta = theta;
  k.T_star = 2.0 * k.b / k.a;
  return k;
}

double unit_sphere_area(int dimension) {
  switch (dimension) {
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    default: throw ConfigError("unit_sphere_area: dimension must be 2 or 3");
  }
}

std::pair<double, double> weight_measure(const WeightParams& params, double radius) {
  if (!(radius > 0.0) || radius > params.half_width) {
    throw ConfigError("weight_measure: radius must lie in (0, L]");
  }
  const int N = params.dimension;
  const double area = unit_sphere_area(N);
  boost::math::quadrature::tanh_sinh<double> integrator;

  auto raw = [&](double r) { return std::pow(r, params.alpha) * std::pow(r, N - 1); };
  const double raw_measure = area * integrator.integrate(raw, 0.0, radius);
  if (params.epsilon == 0.0) return {raw_measure, raw_measure};

  auto regularized = [&](double r) { return radial_weight(params, r) * std::pow(r, N - 1); };
  const double split = std::min(params.epsilon, radius);
  double reg = integrator.integrate(regularized, 0.0, split);
  if (radius > split) reg += integrator.integrate(regularized, split, radius);
  return {raw_measure, area * reg};
}

}  // namespace degenwave
