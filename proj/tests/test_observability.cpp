#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "degenwave/discretization.hpp"
#include "degenwave/error.hpp"
#include "degenwave/observability.hpp"
#include "degenwave/spectral.hpp"
#include "degenwave/wave_solver.hpp"
#include "degenwave/weight_model.hpp"
#include "support/generators.hpp"

namespace dw = degenwave;
using dw::testing::Gen;

namespace {

dw::WeightParams params(double alpha, double eps) {
  dw::WeightParams p;
  p.alpha = alpha;
  p.epsilon = eps;
  return p;
}

double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST(Gamma0, SelectsFacesLookingAwayFromTheOrigin) {
  const dw::Grid centered(2, 7, 1.0);
  EXPECT_EQ(dw::gamma0(centered).size(), centered.boundary().size());

  // Shifted box (0.5, 2.5) x (-1, 1): the face x = 0.5 has x . nu < 0.
  const dw::Grid shifted(2, 7, 1.0, {1.5, 0.0, 0.0});
  const auto subset = dw::gamma0(shifted);
  EXPECT_EQ(subset.size(), shifted.boundary().size() - 7);
  for (dw::Index b : subset) {
    const auto& node = shifted.boundary()[static_cast<std::size_t>(b)];
    EXPECT_FALSE(node.axis == 0 && node.side == -1);
  }
  // Entirely in x > 0 and y > 0 with the origin outside: lower faces drop out.
  const dw::Grid far(2, 5, 1.0, {2.0, 2.0, 0.0});
  EXPECT_EQ(dw::gamma0(far).size(), 10u);
}

TEST(FluxIntegral, MatchesTrapezoidByHand) {
  const dw::Grid grid(2, 3, 1.0);
  const std::vector<double> times{0.0, 0.5, 1.5};
  Eigen::MatrixXd flux = Eigen::MatrixXd::Zero(grid.boundary_count(), 3);
  flux.row(0) << 1.0, 2.0, 0.0;
  flux.row(4) << 3.0, 3.0, 3.0;
  // row 0: 0.25 (1 + 4) + 0.5 (4 + 0) = 3.25; row 4: 9 * 1.5 = 13.5
  EXPECT_NEAR(dw::flux_integral(flux, times, {0}, grid), 3.25 * grid.face_element(), 1e-14);
  EXPECT_NEAR(dw::flux_integral(flux, times, {0, 4}, grid), 16.75 * grid.face_element(), 1e-14);
  EXPECT_THROW(dw::flux_integral(flux, {0.0, 1.0}, {0}, grid), dw::ConfigError);
}

TEST(Observability, QuotientExceedsTheMultiplierBound) {
  const auto p = params(1.0, 0.1);
  const dw::Grid grid(2, 31, 1.0);
  const auto op = dw::assemble_operator(grid, p);
  const auto filtered = dw::compute_filtered_eigs(op, 0.5);
  const auto k = dw::constants(p, grid);
  std::mt19937_64 rng(501);
  for (int draw = 0; draw < 5; ++draw) {
    const auto [y0, y1] = dw::random_filtered_data(filtered, rng);
    dw::ObservabilityConfig cfg;
    cfg.steps = 800;
    const auto rep = dw::observability_experiment(op, filtered, k, y0, y1, cfg);
    EXPECT_TRUE(rep.pass);
    EXPECT_TRUE(rep.weighted_pass);
    EXPECT_GT(rep.quotient, rep.predicted);
    EXPECT_NEAR(rep.predicted, k.observability_constant(8.0, 1.0), 1e-15);
    EXPECT_EQ(rep.modes, filtered.size());
    // Energy of the filtered data, recomputed from mode coefficients.
    const Eigen::VectorXd a = dw::project(filtered, y0), b = dw::project(filtered, y1);
    EXPECT_NEAR(rep.energy0, 0.5 * (b.squaredNorm() + (filtered.eigenvalues.array() * a.array().square()).sum()),
                1e-10 * rep.energy0);
  }
}

TEST(Observability, RejectsShortHorizonsAndNullData) {
  const auto p = params(1.0, 0.1);
  const dw::Grid grid(2, 11, 1.0);
  const auto op = dw::assemble_operator(grid, p);
  const auto filtered = dw::compute_filtered_eigs(op, 0.5);
  const auto k = dw::constants(p, grid);
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(op.size());
  const Eigen::VectorXd one = filtered.eigenvectors.col(0);
  dw::ObservabilityConfig cfg;
  cfg.T = k.T_star;
  EXPECT_THROW(dw::observability_experiment(op, filtered, k, one, z, cfg), dw::ConfigError);
  cfg.T = 8.0;
  EXPECT_THROW(dw::observability_experiment(op, filtered, k, z, z, cfg), dw::ConfigError);
  const auto adhoc = dw::assemble_operator(grid, [](std::span<const double>) { return 1.0; });
  EXPECT_THROW(dw::observability_experiment(adhoc, filtered, k, one, z, cfg), dw::ConfigError);
}

TEST(RandomData, IsSeededAndStaysInTheSpan) {
  const auto op = dw::assemble_operator(dw::build_grid(2, 11, 1.0), params(1.0, 0.1));
  const auto basis = dw::compute_eigs(op, 12);
  std::mt19937_64 r1(7), r2(7);
  const auto a = dw::random_filtered_data(basis, r1);
  const auto b = dw::random_filtered_data(basis, r2);
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
  EXPECT_LE((dw::synthesize(basis, dw::project(basis, a.first)) - a.first).cwiseAbs().maxCoeff(), 1e-12);
  const auto c = dw::random_filtered_data(basis, r1);
  EXPECT_NE(a.first, c.first);
}

TEST(Bump, SupportAndPeak) {
  const dw::Grid grid(2, 21, 1.0);
  const auto phi = dw::smooth_bump(grid, {0.0, 0.0, 0.0}, 0.5);
  for (dw::Index p = 0; p < phi.size(); ++p) {
    const double r = dw::norm(grid.position(p), 2);
    if (r >= 0.5) EXPECT_EQ(phi[p], 0.0);
    else EXPECT_GT(phi[p], 0.0);
  }
  EXPECT_DOUBLE_EQ(phi.maxCoeff(), 1.0);  // grid node at the center
}

TEST(BallGradient, WholeBoxEqualsUnitWeightEnergy) {
  Gen g(502);
  for (int N : {2, 3}) {
    const dw::Grid grid(N, N == 2 ? 9 : 5, 1.0);
    const auto op = dw::assemble_operator(grid, [](std::span<const double>) { return 1.0; });
    const Eigen::VectorXd phi = g.vector(op.size());
    EXPECT_NEAR(dw::ball_gradient_energy(grid, phi, 10.0), dw::energy_form(op, phi, phi), 1e-10);
  }
}

TEST(BallGradient, MatchesBruteForceEdgeSum) {
  const dw::Grid grid(2, 9, 1.0);
  Gen g(503);
  const Eigen::VectorXd phi = g.vector(grid.interior_count());
  const int n = grid.nodes_per_axis();
  auto value = [&](int i, int j) { return (i < 0 || j < 0 || i >= n || j >= n) ? 0.0 : phi[grid.flat_index({i, j, 0})]; };
  const double radius = 0.45, h = grid.spacing();
  double expected = 0.0;
  for (int i = -1; i < n; ++i) {
    for (int j = -1; j <= n; ++j) {
      // x-edge (i, j) -- (i + 1, j) and y-edge (j, i) -- (j, i + 1)
      if (j >= 0 && j < n) {
        const double mx = grid.edge_midpoint(0, i), my = grid.coordinate(1, j);
        if (std::hypot(mx, my) < radius) expected += std::pow((value(i + 1, j) - value(i, j)) / h, 2);
        const double ex = grid.coordinate(0, j), ey = grid.edge_midpoint(1, i);
        if (std::hypot(ex, ey) < radius) expected += std::pow((value(j, i + 1) - value(j, i)) / h, 2);
      }
    }
  }
  EXPECT_NEAR(dw::ball_gradient_energy(grid, phi, radius), expected * grid.volume_element(), 1e-10);
}

TEST(ApproximationSweep, EnergyGapMatchesOperatorDifference) {
  const auto base = params(1.0, 0.0);
  const dw::Grid grid(2, 21, 1.0);
  const Eigen::VectorXd phi0 = dw::smooth_bump(grid, {0.0, 0.0, 0.0}, 0.5);
  const Eigen::VectorXd phi1 = Eigen::VectorXd::Zero(grid.interior_count());
  const std::vector<double> eps{0.24, 0.16};
  dw::ApproximationConfig cfg;
  cfg.T = 2.0;
  const auto sweep = dw::approximation_sweep(base, grid, phi0, phi1, eps, cfg);
  const auto ref = dw::assemble_operator(grid, base);
  ASSERT_EQ(sweep.energy_gap.size(), 2u);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const auto op = dw::assemble_operator(grid, base.with_epsilon(eps[i]));
    const Eigen::VectorXd d = op.matrix * phi0 - ref.matrix * phi0;
    const double gap = 0.5 * phi0.dot(d) * grid.volume_element();
    EXPECT_NEAR(sweep.energy_gap[i], gap, 1e-12 * sweep.reference_energy);
    EXPECT_GE(sweep.energy_gap[i], 0.0);
    EXPECT_LE(sweep.energy_gap[i], sweep.energy_gap_bound[i]);
    EXPECT_LE(sweep.measure[i], sweep.measure_bound[i]);
    EXPECT_GT(sweep.solution_distance[i], 0.0);
  }
  EXPECT_LT(sweep.solution_distance[1], sweep.solution_distance[0]);
  EXPECT_LT(sweep.energy_gap[1], sweep.energy_gap[0]);
  EXPECT_GT(sweep.dt, 0.0);
}

TEST(ApproximationSweep, RejectsUnresolvedEpsilon) {
  const dw::Grid grid(2, 21, 1.0);
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(grid.interior_count());
  EXPECT_THROW(dw::approximation_sweep(params(1.0, 0.0), grid, z, z, {0.1}, {}), dw::ConfigError);
  EXPECT_THROW(dw::approximation_sweep(params(1.0, 0.0), grid, z, z, {0.3}, {}), dw::ConfigError);
}

TEST(MultiplierIdentity, HoldsForSpectralSolutions) {
  Gen g(504);
  for (int trial = 0; trial < 3; ++trial) {
    const auto p = g.params();
    const auto op = dw::assemble_operator(dw::build_grid(2, 11, 1.0), p);
    const auto basis = dw::compute_eigs(op, 10);
    const auto rec = dw::solve_spectral(op, basis, dw::synthesize(basis, g.vector(10)),
                                        dw::synthesize(basis, g.vector(10)), dw::Forcing::zero(), 4.0, 8000, {false});
    EXPECT_LT(dw::multiplier_identity_residual(rec, 2.0 - 0.375), 1e-5);
  }
  dw::SolutionRecord empty;
  EXPECT_THROW(dw::multiplier_identity_residual(empty, std::numeric_limits<double>::quiet_NaN()), dw::ConfigError);
}

TEST(MultiplierIdentity, ModeClosedFormAgreesWithQuadrature) {
  Gen g(505);
  for (int trial = 0; trial < 50; ++trial) {
    const double lambda = g.uniform(0.5, 200.0), d0 = g.normal(), d1 = g.normal(), T = g.uniform(0.5, 8.0);
    const double w = std::sqrt(lambda);
    auto d = [&](double t) { return d0 * std::cos(w * t) + d1 * std::sin(w * t) / w; };
    auto dd = [&](double t) { return -d0 * w * std::sin(w * t) + d1 * std::cos(w * t); };
    const auto terms = dw::mode_identity_closed_form(lambda, d0, d1, T);
    const double quad = simpson([&](double t) { return dd(t) * dd(t) - lambda * d(t) * d(t); }, 0.0, T, 20000);
    const double scale = 1.0 + std::abs(quad);
    EXPECT_NEAR(terms.integral, quad, 1e-7 * scale);
    EXPECT_NEAR(terms.boundary, terms.integral, 1e-10 * scale);
  }
}
