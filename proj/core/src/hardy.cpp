#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "degenwave/error.hpp"
#include "degenwave/spectral.hpp"

namespace degenwave {

RadialTestFunction make_test_function(HardyFamily family, double R, double beta) {
  switch (family) {
    case HardyFamily::Linear:
      return {"R-r", [R](double r) { return R - r; }, [](double) { return -1.0; }};
    case HardyFamily::LinearTimesPower:
      if (!(beta >= 1.0)) throw ConfigError("(R-r) r^beta needs beta >= 1 for a bounded gradient");
      return {"(R-r)r^" + std::to_string(beta),
              [R, beta](double r) { return (R - r) * std::pow(r, beta); },
              [R, beta](double r) { return -std::pow(r, beta) + (R - r) * beta * std::pow(r, beta - 1.0); }};
    case HardyFamily::Quadratic:
      return {"R^2-r^2", [R](double r) { return R * R - r * r; }, [](double r) { return -2.0 * r; }};
  }
  throw ConfigError("unknown Hardy test family");
}

std::vector<RadialTestFunction> standard_test_family(double R) {
  return {make_test_function(HardyFamily::Linear, R), make_test_function(HardyFamily::LinearTimesPower, R, 1.0),
          make_test_function(HardyFamily::LinearTimesPower, R, 2.0), make_test_function(HardyFamily::Quadratic, R)};
}

HardyReport hardy_check(const WeightParams& params, double R, const RadialTestFunction& u) {
  params.validate();
  if (!(R > 0.0) || R > params.half_width) throw ConfigError("hardy_check: ball radius must lie in (0, L]");
  const double edge = u.value(R);
  if (std::abs(edge) > 1e-12 * std::max(1.0, std::abs(u.value(0.0)))) {
    throw ConfigError("hardy_check: test function " + u.name + " does not vanish at r = R");
  }

  const int N = params.dimension;
  const double alpha = params.alpha;
  const double k = N - 2.0 + alpha;
  const double M = params.sup_radius_plus_one();
  auto rho = [&](double r) { return params.epsilon > 0.0 ? psi(params, r) : r; };

  boost::math::quadrature::tanh_sinh<double> integrator;
  // Split at epsilon so each piece is smooth; the r^(alpha-2) r^(N-1)
  // singularity at 0 is integrable and handled by tanh-sinh.
  auto integrate = [&](auto&& f) {
    const double split = params.epsilon > 0.0 ? std::min(params.epsilon, R) : R;
    double total = integrator.integrate(f, 0.0, split);
    if (R > split) total += integrator.integrate(f, split, R);
    return total;
  };
  const double area = unit_sphere_area(N);

  HardyReport rep;
  rep.function = u.name;
  rep.hardy_lhs = k * k * area * integrate([&](double r) {
    const double v = u.value(r);
    // Without regularization merge the powers: r^(alpha+N-3) is integrable but
    // r^(alpha-2) alone overflows at the tiny abscissae tanh-sinh visits.
    if (params.epsilon == 0.0) return r > 0.0 ? std::pow(r, alpha + N - 3.0) * v * v : 0.0;
    return std::pow(rho(r), alpha - 2.0) * v * v * std::pow(r, N - 1);
  });
  const double grad_energy = area * integrate([&](double r) {
    const double d = u.derivative(r);
    return std::pow(rho(r), alpha) * d * d * std::pow(r, N - 1);
  });
  rep.hardy_rhs = 4.0 * grad_energy;
  rep.poincare_lhs = area * integrate([&](double r) {
    const double v = u.value(r);
    return v * v * std::pow(r, N - 1);
  });
  rep.poincare_rhs = 4.0 * std::pow(M, 2.0 - alpha) / (k * k) * grad_energy;

  auto ratio = [](double lhs, double rhs) { return lhs == 0.0 && rhs == 0.0 ? 0.0 : lhs / rhs; };
  rep.hardy_ratio = ratio(rep.hardy_lhs, rep.hardy_rhs);
  rep.poincare_ratio = ratio(rep.poincare_lhs, rep.poincare_rhs);
  return rep;
}

std::vector<HardyReport> hardy_check(double alpha, double epsilon, int dimension, HardyFamily family, double R) {
  WeightParams params;
  params.alpha = alpha;
  params.epsilon = epsilon;
  params.dimension = dimension;
  std::vector<HardyReport> out;
  if (family == HardyFamily::LinearTimesPower) {
    for (double beta : {1.0, 2.0, 3.0}) out.push_back(hardy_check(params, R, make_test_function(family, R, beta)));
  } else {
    out.push_back(hardy_check(params, R, make_test_function(family, R)));
  }
  return out;
}

}  // namespace degenwave
