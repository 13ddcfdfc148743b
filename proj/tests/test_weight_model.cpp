#include <array>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "degenwave/discretization.hpp"
#include "degenwave/error.hpp"
#include "degenwave/weight_model.hpp"
#include "support/generators.hpp"

namespace dw = degenwave;
using dw::testing::Gen;

namespace {

dw::WeightParams params(double alpha, double eps, int N = 2) {
  dw::WeightParams p;
  p.alpha = alpha;
  p.epsilon = eps;
  p.dimension = N;
  return p;
}

// Independent polynomial, written out from its definition.
double psi_ref(double r, double e) {
  if (r >= e) return r;
  return 3.0 * e / 8.0 + 3.0 * r * r / (4.0 * e) - std::pow(r, 4) / (8.0 * e * e * e);
}

}  // namespace

TEST(Regularizer, ValuesAtReferencePoints) {
  const auto p = params(1.0, 0.1);
  EXPECT_DOUBLE_EQ(dw::psi(p, 0.0), 3.0 * 0.1 / 8.0);
  EXPECT_NEAR(dw::psi(p, 0.1), 0.1, 1e-16);
  EXPECT_DOUBLE_EQ(dw::psi(p, 0.5), 0.5);
  EXPECT_NEAR(dw::psi(p, 0.05), 0.05546875, 1e-15);
  EXPECT_NEAR(dw::psi_prime(p, 0.0), 0.0, 1e-15);
  EXPECT_NEAR(dw::psi_second(p, 0.0), 15.0, 1e-12);  // 3 / (2 eps)
}

TEST(Regularizer, MatchesDefinitionOnRandomRadii) {
  Gen g(101);
  for (int i = 0; i < 2000; ++i) {
    const double e = g.uniform(0.005, 0.24);
    const double r = g.uniform(0.0, 2.0 * e);
    const auto p = params(g.uniform(0.05, 1.95), e);
    EXPECT_NEAR(dw::psi(p, r), psi_ref(r, e), 1e-15 * std::max(1.0, r / e)) << "r=" << r << " e=" << e;
  }
}

TEST(Regularizer, DerivativesAgreeWithFiniteDifferences) {
  Gen g(102);
  for (int i = 0; i < 500; ++i) {
    const double e = g.uniform(0.01, 0.2);
    const double r = g.uniform(0.01 * e, 0.99 * e);
    const auto p = params(1.0, e);
    const double d = 1e-6 * e;
    const double fd1 = (psi_ref(r + d, e) - psi_ref(r - d, e)) / (2 * d);
    const double fd2 = (psi_ref(r + d, e) - 2 * psi_ref(r, e) + psi_ref(r - d, e)) / (d * d);
    EXPECT_NEAR(dw::psi_prime(p, r), fd1, 1e-7);
    EXPECT_NEAR(dw::psi_second(p, r), fd2, 2e-3 / e);
  }
}

TEST(Regularizer, JunctionIsC2) {
  for (double e : {0.02, 0.1, 0.2}) {
    const auto p = params(1.0, e);
    const double left = std::nextafter(e, 0.0);
    EXPECT_NEAR(dw::psi(p, left), dw::psi(p, e), 1e-12 * e);
    EXPECT_NEAR(dw::psi_prime(p, left), 1.0, 1e-12);
    EXPECT_NEAR(dw::psi_second(p, left), 0.0, 1e-12 / e);
    EXPECT_EQ(dw::psi_second(p, e), 0.0);
  }
}

TEST(Regularizer, SandwichAndRadialityHoldEverywhereInTheBall) {
  Gen g(103);
  for (int i = 0; i < 5000; ++i) {
    const int N = g.integer(2, 3);
    const double e = g.uniform(0.01, 0.24);
    const auto p = params(g.uniform(0.05, 1.95), e, N);
    std::array<double, 3> x{};
    double r2 = 0.0;
    do {
      r2 = 0.0;
      for (int d = 0; d < N; ++d) {
        x[d] = g.uniform(-e, e);
        r2 += x[d] * x[d];
      }
    } while (r2 >= e * e);
    const double r = std::sqrt(r2);
    const std::span<const double> xs(x.data(), static_cast<std::size_t>(N));
    const double v = dw::psi(p, r);
    EXPECT_LE(r, v);
    EXPECT_LE(v, e);
    const auto grad = dw::psi_gradient(p, xs);
    double xg = 0.0;
    for (int d = 0; d < N; ++d) xg += x[d] * grad[d];
    const double expected = 3.0 / (8.0 * e * e * e) * (e * e - r2) * (e * e - r2);
    EXPECT_NEAR(v - xg, expected, 1e-12 * e);
  }
}

TEST(Regularizer, RejectsInvalidArguments) {
  EXPECT_THROW(dw::psi(params(1.0, 0.0), 0.1), dw::ConfigError);
  EXPECT_THROW(dw::psi(params(1.0, 0.1), -0.1), dw::ConfigError);
  const std::array<double, 2> x{0.1, 0.0};
  EXPECT_THROW(dw::weight_gradient(params(1.0, 0.0), x), dw::ConfigError);
}

TEST(Weight, UnregularizedIsPowerOfRadius) {
  const std::array<double, 2> x{0.3, -0.4};
  EXPECT_NEAR(dw::weight(params(1.5, 0.0), x), std::pow(0.5, 1.5), 1e-15);
  const std::array<double, 2> origin{0.0, 0.0};
  EXPECT_EQ(dw::weight(params(1.0, 0.0), origin), 0.0);
  EXPECT_NEAR(dw::weight(params(1.0, 0.1), origin), 0.0375, 1e-16);
}

TEST(Weight, GradientAgreesWithFiniteDifferences) {
  Gen g(104);
  for (int i = 0; i < 300; ++i) {
    const auto p = params(g.uniform(0.05, 1.95), g.uniform(0.05, 0.2), 3);
    std::array<double, 3> x{g.uniform(-0.3, 0.3), g.uniform(-0.3, 0.3), g.uniform(-0.3, 0.3)};
    const auto grad = dw::weight_gradient(p, x);
    for (int d = 0; d < 3; ++d) {
      auto xp = x, xm = x;
      const double step = 1e-6;
      xp[d] += step;
      xm[d] -= step;
      const double fd = (dw::weight(p, xp) - dw::weight(p, xm)) / (2 * step);
      EXPECT_NEAR(grad[d], fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(Multiplier, SpotValueAtReferencePoint) {
  const std::array<double, 2> x{0.05, 0.0};
  // f / (8 eps^3 psi) with f = 3 eps^4 + r^4 at alpha = 1.
  const double expected = (3e-4 + std::pow(0.05, 4)) / (8e-3 * 0.05546875);
  EXPECT_NEAR(dw::multiplier_factor(params(1.0, 0.1), x), expected, 1e-12);
  EXPECT_NEAR(dw::multiplier_factor(params(1.0, 0.1), x), 0.690141, 1e-6);
}

TEST(Multiplier, MatchesHalfLogDerivativeOfWeight) {
  // m = 1 - (1/2) x . grad w / w, with grad w from finite differences of w.
  Gen g(105);
  for (int i = 0; i < 300; ++i) {
    const auto p = params(g.uniform(0.05, 1.95), g.uniform(0.02, 0.2));
    std::array<double, 2> x{g.uniform(-0.4, 0.4), g.uniform(-0.4, 0.4)};
    const double step = 1e-6;
    double xg = 0.0;
    for (int d = 0; d < 2; ++d) {
      auto xp = x, xm = x;
      xp[d] += step;
      xm[d] -= step;
      xg += x[d] * (dw::weight(p, xp) - dw::weight(p, xm)) / (2 * step);
    }
    EXPECT_NEAR(dw::multiplier_factor(p, x), 1.0 - 0.5 * xg / dw::weight(p, x), 1e-7);
  }
}

TEST(Multiplier, FloorHoldsForRandomParameters) {
  Gen g(106);
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = g.params(2, false);
    const double a = dw::multiplier_floor(p.alpha);
    const double hat_a = dw::quartic_floor(p.alpha, p.epsilon);
    for (int i = 0; i < 5000; ++i) {
      const double r = i % 2 ? g.uniform(0.0, p.epsilon) : g.uniform(0.0, 1.5);
      const double m = dw::radial_multiplier_factor(p, r);
      ASSERT_GE(m, a - 1e-12) << "alpha=" << p.alpha << " eps=" << p.epsilon << " r=" << r;
      if (r < p.epsilon) {
        const double e = p.epsilon;
        ASSERT_GE(m * 8.0 * e * e * e * dw::psi(p, r), hat_a * (1.0 - 1e-12)) << "alpha=" << p.alpha;
      }
    }
  }
}

TEST(Multiplier, FloorFormula) {
  EXPECT_DOUBLE_EQ(dw::multiplier_floor(1.0), 0.375);
  EXPECT_DOUBLE_EQ(dw::multiplier_floor(0.5), 0.375);
  EXPECT_DOUBLE_EQ(dw::multiplier_floor(1.5), 0.1875);
  EXPECT_DOUBLE_EQ(dw::quartic_floor(0.5, 0.1), 3e-4);
  // alpha > 1: eps^4 min{3, 3 (3 alpha - 2)(2 - alpha) / (2 alpha - 1)}
  EXPECT_NEAR(dw::quartic_floor(1.5, 0.1), 1e-4 * std::min(3.0, 3.0 * 2.5 * 0.5 / 2.0), 1e-18);
}

TEST(Constants, ReferenceSquare) {
  const dw::Grid grid = dw::build_grid(2, 61, 1.0);
  const auto k = dw::constants(params(1.0, 0.1), grid);
  EXPECT_DOUBLE_EQ(k.a, 0.375);
  EXPECT_DOUBLE_EQ(k.P, 1.625);
  EXPECT_DOUBLE_EQ(k.c, 3.859375);
  EXPECT_NEAR(k.b, std::pow(2.0, 0.25), 1e-13);
  EXPECT_NEAR(k.theta, 1.0, 1e-13);
  EXPECT_NEAR(k.T_star, 2.0 * std::pow(2.0, 0.25) / 0.375, 1e-12);
  EXPECT_NEAR(k.M, std::sqrt(2.0) + 1.0, 1e-14);
  const double expected = 2.0 * (0.375 * 8.0 - 2.0 * std::pow(2.0, 0.25)) / std::pow(std::sqrt(2.0) + 1.0, 2.0);
  EXPECT_NEAR(k.observability_constant(8.0, 1.0), expected, 1e-13);
  EXPECT_NEAR(k.observability_constant(8.0, 1.0), 0.2133, 1e-4);
  EXPECT_NEAR(k.weighted_observability_constant(8.0, 1.0), 2.0 * (3.0 - 2.0 * std::pow(2.0, 0.25)), 1e-13);
}

TEST(Constants, BruteForceSupremaOnShiftedGrids) {
  Gen g(107);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = g.params(2);
    const int n = 2 * g.integer(3, 10) + 1;
    const dw::Grid grid = dw::build_grid(2, n, 1.0);
    const auto k = dw::constants(p, grid);
    // Independent sweep of the closed grid (interior, faces, edges, corners).
    double b = 0.0, theta = 0.0;
    const double h = 2.0 / (n + 1);
    for (int i = 0; i <= n + 1; ++i) {
      for (int j = 0; j <= n + 1; ++j) {
        const std::array<double, 2> x{-1.0 + i * h, -1.0 + j * h};
        const double r = std::hypot(x[0], x[1]);
        if (r > 0.0) b = std::max(b, r / std::sqrt(dw::weight(p, x)));
        const bool face_x = (i == 0 || i == n + 1) && j > 0 && j < n + 1;
        const bool face_y = (j == 0 || j == n + 1) && i > 0 && i < n + 1;
        if (face_x) theta = std::max(theta, std::abs(x[0]) / std::pow(r, p.alpha));
        if (face_y) theta = std::max(theta, std::abs(x[1]) / std::pow(r, p.alpha));
      }
    }
    EXPECT_NEAR(k.b, b, 1e-12 * b);
    EXPECT_NEAR(k.theta, theta, 1e-12 * theta);
    EXPECT_NEAR(k.T_star, 2.0 * b / k.a, 1e-12 * k.T_star);
  }
}

TEST(Constants, BDoesNotDependOnEpsilon) {
  // psi_eps >= |x| keeps the supremum of |x| / sqrt(w_eps) at the corners.
  Gen g(108);
  const dw::Grid grid = dw::build_grid(2, 41, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double alpha = g.uniform(dw::kAlphaMin, dw::kAlphaMax);
    const double b0 = dw::constants(params(alpha, 0.0), grid).b;
    for (double eps : {0.02, 0.05, 0.1, 0.2}) EXPECT_NEAR(dw::constants(params(alpha, eps), grid).b, b0, 1e-14 * b0);
  }
}

TEST(Params, Validation) {
  EXPECT_NO_THROW(params(1.0, 0.1).validate());
  EXPECT_THROW(params(0.0, 0.1).validate(), dw::ConfigError);
  EXPECT_THROW(params(2.0, 0.1).validate(), dw::ConfigError);
  EXPECT_THROW(params(1.0, 0.25).validate(), dw::ConfigError);
  EXPECT_THROW(params(1.0, -0.1).validate(), dw::ConfigError);
  EXPECT_THROW(params(1.0, 0.1, 4).validate(), dw::ConfigError);
  auto p = params(1.0, 0.1);
  p.R0 = 0.2;  // 8 R0 >= L
  EXPECT_THROW(p.validate(), dw::ConfigError);
  EXPECT_TRUE(params(1.0, 0.1).regularizer_in_reference_range());
  EXPECT_FALSE(params(1.0, 0.2).regularizer_in_reference_range());
  EXPECT_FALSE(params(1.0, 0.0).regularizer_in_reference_range());
}

TEST(Measure, SphereAreas) {
  EXPECT_NEAR(dw::unit_sphere_area(2), 2.0 * std::numbers::pi, 1e-15);
  EXPECT_NEAR(dw::unit_sphere_area(3), 4.0 * std::numbers::pi, 1e-15);
}

TEST(Measure, RegularizedBallMassBelowBound) {
  Gen g(108);
  for (int trial = 0; trial < 50; ++trial) {
    const int N = g.integer(2, 3);
    const auto p = params(g.uniform(0.05, 1.95), g.uniform(0.01, 0.24), N);
    const double e = p.epsilon;
    const auto [raw, reg] = dw::weight_measure(p, e);
    const double ball = dw::unit_sphere_area(N) * std::pow(e, N) / N;
    EXPECT_LE(reg, std::pow(e, p.alpha) * ball * (1.0 + 1e-12));
    // w(B) in closed form: |S| eps^(N + alpha) / (N + alpha).
    EXPECT_NEAR(raw, dw::unit_sphere_area(N) * std::pow(e, N + p.alpha) / (N + p.alpha), 1e-10 * raw);
    // Simpson on the regularized radial integrand.
    const int m = 2000;
    double s = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double r = e * i / m;
      const double f = std::pow(psi_ref(r, e), p.alpha) * std::pow(r, N - 1);
      s += (i == 0 || i == m ? 1.0 : (i % 2 ? 4.0 : 2.0)) * f;
    }
    s *= e / (3.0 * m) * dw::unit_sphere_area(N);
    EXPECT_NEAR(reg, s, 1e-9 * s);
  }
}
