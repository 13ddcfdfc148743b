#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "degenwave/discretization.hpp"
#include "degenwave/error.hpp"
#include "degenwave/spectral.hpp"
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

const dw::WeightField kUnit = [](std::span<const double>) { return 1.0; };

std::vector<double> laplacian_spectrum(int N, int n, double h) {
  std::vector<double> axis;
  for (int k = 1; k <= n; ++k) {
    const double s = std::sin(k * std::numbers::pi / (2.0 * (n + 1)));
    axis.push_back(4.0 / (h * h) * s * s);
  }
  std::vector<double> out;
  for (double a : axis) {
    for (double b : axis) {
      if (N == 2) {
        out.push_back(a + b);
      } else {
        for (double c : axis) out.push_back(a + b + c);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Eigs, ConstantWeightMatchesClosedFormSpectrum) {
  for (int N : {2, 3}) {
    const int n = N == 2 ? 15 : 7;
    const dw::Grid grid(N, n, 1.0);
    const auto op = dw::assemble_operator(grid, kUnit);
    const auto basis = dw::compute_eigs(op, op.size());
    const auto exact = laplacian_spectrum(N, n, grid.spacing());
    for (dw::Index k = 0; k < basis.size(); ++k) {
      EXPECT_NEAR(basis.eigenvalues[k], exact[static_cast<std::size_t>(k)], 1e-9 * exact[static_cast<std::size_t>(k)]);
    }
  }
}

TEST(Eigs, GroundStateOfLaplacianIsSineProduct) {
  const int n = 15;
  const dw::Grid grid(2, n, 1.0);
  const auto basis = dw::compute_eigs(dw::assemble_operator(grid, kUnit), 1);
  Eigen::VectorXd expected(grid.interior_count());
  for (dw::Index p = 0; p < expected.size(); ++p) {
    const auto idx = grid.multi_index(p);
    expected[p] = std::sin((idx[0] + 1) * std::numbers::pi / (n + 1)) * std::sin((idx[1] + 1) * std::numbers::pi / (n + 1));
  }
  expected /= std::sqrt(expected.squaredNorm() * grid.volume_element());
  EXPECT_LE((basis.eigenvectors.col(0) - expected).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Eigs, LanczosAgreesWithDense) {
  for (int n : {9, 41}) {
    const auto op = dw::assemble_operator(dw::build_grid(2, n, 1.0), params(1.0, 0.1));
    dw::EigenOptions dense, lanczos;
    dense.method = dw::EigenMethod::Dense;
    lanczos.method = dw::EigenMethod::Lanczos;
    const auto wide = dw::compute_eigs(op, 40, dense);
    const auto a = dw::truncate(wide, 30);
    const auto b = dw::compute_eigs(op, 30, lanczos);
    for (dw::Index k = 0; k < 30; ++k) EXPECT_NEAR(a.eigenvalues[k], b.eigenvalues[k], 1e-9 * a.eigenvalues[k]);
    // The square has double eigenvalues, so compare spanned subspaces: the
    // projector onto every dense mode up to the last requested eigenvalue
    // (a pair may straddle the cut) must reproduce the Lanczos modes.
    dw::Index k = 0;
    while (k < wide.size() && wide.eigenvalues[k] <= b.eigenvalues[29] * (1 + 1e-8)) ++k;
    const Eigen::MatrixXd V = wide.eigenvectors.leftCols(k);
    const Eigen::MatrixXd P = V * (V.transpose() * b.eigenvectors) * a.volume_element;
    EXPECT_LE((P - b.eigenvectors).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LE(dw::gram_residual(b), 1e-10);
    EXPECT_LE(b.residuals.maxCoeff(), 1e-8 * b.eigenvalues.maxCoeff());
  }
}

TEST(Eigs, OrthonormalitySignsAndWeightedGram) {
  const auto op = dw::assemble_operator(dw::build_grid(2, 21, 1.0), params(0.6, 0.05));
  const auto basis = dw::compute_eigs(op, 25);
  EXPECT_LE(dw::gram_residual(basis), 1e-10);
  EXPECT_LE(dw::weighted_gram_residual(op, basis), 1e-10);
  for (dw::Index k = 0; k < basis.size(); ++k) {
    const auto v = basis.eigenvectors.col(k);
    const double cut = 1e-8 * v.cwiseAbs().maxCoeff();
    for (dw::Index i = 0; i < v.size(); ++i) {
      if (std::abs(v[i]) > cut) {
        EXPECT_GT(v[i], 0.0) << "mode " << k;
        break;
      }
    }
  }
  for (dw::Index k = 1; k < basis.size(); ++k) EXPECT_LE(basis.eigenvalues[k - 1], basis.eigenvalues[k]);
}

TEST(Eigs, RejectsBadCounts) {
  const auto op = dw::assemble_operator(dw::build_grid(2, 5, 1.0), params(1.0, 0.1));
  EXPECT_THROW(dw::compute_eigs(op, 0), dw::ConfigError);
  EXPECT_THROW(dw::compute_eigs(op, 26), dw::ConfigError);
}

TEST(Eigs, FirstEigenvalueDecreasesToTheDegenerateLimit) {
  // w_eps decreases pointwise with eps and stays above w, so by min-max the
  // ground state energy does too.
  const dw::Grid grid(2, 31, 1.0);
  for (double alpha : {0.5, 1.0, 1.5}) {
    const double limit = dw::compute_eigs(dw::assemble_operator(grid, params(alpha, 0.0)), 1).eigenvalues[0];
    double previous = std::numeric_limits<double>::infinity();
    for (double eps : {0.2, 0.1, 0.05}) {
      const double l1 = dw::compute_eigs(dw::assemble_operator(grid, params(alpha, eps)), 1).eigenvalues[0];
      EXPECT_LT(l1, previous) << "alpha " << alpha << " eps " << eps;
      EXPECT_GT(l1, limit);
      previous = l1;
    }
    EXPECT_GE(limit, dw::first_eigenvalue_lower_bound(alpha, 2, std::sqrt(2.0) + 1.0));
  }
}

TEST(Filter, KeepsExactlyTheModesBelowTheCut) {
  const dw::Grid grid(2, 21, 1.0);
  const auto op = dw::assemble_operator(grid, params(1.0, 0.1));
  const auto all = dw::compute_eigs(op, op.size());
  for (double gamma : {0.3, 0.5, 0.8}) {
    const auto filtered = dw::compute_filtered_eigs(op, gamma);
    dw::Index expected = 0;
    for (dw::Index k = 0; k < all.size(); ++k) expected += std::sqrt(all.eigenvalues[k]) * grid.spacing() <= gamma;
    EXPECT_EQ(filtered.size(), expected) << "gamma " << gamma;
    EXPECT_EQ(dw::filter_modes(all, gamma, grid.spacing()).size(), expected);
  }
}

TEST(Basis, ProjectSynthesizeRoundTrip) {
  const auto op = dw::assemble_operator(dw::build_grid(2, 13, 1.0), params(1.2, 0.1));
  const auto basis = dw::compute_eigs(op, 20);
  Gen g(301);
  const Eigen::VectorXd c = g.vector(20);
  EXPECT_LE((dw::project(basis, dw::synthesize(basis, c)) - c).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(dw::truncate(basis, 5).size(), 5);
}

TEST(Series, IdentitiesHoldOnFullBasis) {
  Gen g(302);
  for (int trial = 0; trial < 5; ++trial) {
    const auto op = dw::assemble_operator(dw::build_grid(2, 11, 1.0), g.params(2));
    const auto basis = dw::compute_eigs(op, op.size());
    const auto rep = dw::series_identities_check(op, basis, g.vector(op.size()));
    EXPECT_LE(rep.energy_residual, 1e-10);
    EXPECT_LE(rep.image_residual, 1e-10);
  }
}

TEST(Series, PartialBasisBoundsTheFullEnergy) {
  const auto op = dw::assemble_operator(dw::build_grid(2, 11, 1.0), params(1.0, 0.0));
  const auto basis = dw::compute_eigs(op, 30);
  Gen g(303);
  const Eigen::VectorXd phi = g.vector(op.size());
  const auto rep = dw::series_identities_check(op, basis, phi);
  EXPECT_LE(rep.energy_residual, 1e-10);
  EXPECT_LE(rep.image_residual, 1e-10);
  EXPECT_LT(rep.energy_series, dw::energy_form(op, phi, phi));
}

// --- Hardy / Poincare -----------------------------------------------------

TEST(Hardy, ClosedCaseMatchesHandComputation) {
  // alpha = 1, N = 2, u = R - r: LHS = 2 pi R^3 / 3, RHS = 4 * 2 pi R^3 / 3.
  for (double R : {0.5, 1.0}) {
    const auto rep = dw::hardy_check(params(1.0, 0.0), R, dw::make_test_function(dw::HardyFamily::Linear, R));
    EXPECT_NEAR(rep.hardy_lhs, 2.0 * std::numbers::pi * R * R * R / 3.0, 1e-12);
    EXPECT_NEAR(rep.hardy_rhs, 8.0 * std::numbers::pi * R * R * R / 3.0, 1e-12);
    EXPECT_NEAR(rep.hardy_ratio, 0.25, 1e-10);
  }
}

TEST(Hardy, RatiosNeverExceedOne) {
  Gen g(304);
  for (int trial = 0; trial < 60; ++trial) {
    const int N = g.integer(2, 3);
    const auto p = params(g.uniform(0.05, 1.95), g.integer(0, 2) == 0 ? 0.0 : g.uniform(0.01, 0.24), N);
    const double R = g.uniform(0.2, 1.0);
    for (const auto& u : dw::standard_test_family(R)) {
      const auto rep = dw::hardy_check(p, R, u);
      EXPECT_LE(rep.hardy_ratio, 1.0) << u.name << " alpha=" << p.alpha;
      EXPECT_LE(rep.poincare_ratio, 1.0) << u.name << " alpha=" << p.alpha;
      EXPECT_GT(rep.hardy_ratio, 0.0);
    }
  }
}

TEST(Hardy, RegularizedRatioApproachesDegenerateOne) {
  const auto u = dw::make_test_function(dw::HardyFamily::Quadratic, 1.0);
  const double limit = dw::hardy_check(params(0.7, 0.0), 1.0, u).hardy_ratio;
  double previous = 1.0;
  for (double e : {0.2, 0.05, 0.0125}) {
    const double gap = std::abs(dw::hardy_check(params(0.7, e), 1.0, u).hardy_ratio - limit);
    EXPECT_LT(gap, previous);
    previous = gap;
  }
  EXPECT_LT(previous, 1e-2);
}

TEST(Hardy, RejectsBadInputs) {
  const dw::RadialTestFunction bad{"1", [](double) { return 1.0; }, [](double) { return 0.0; }};
  EXPECT_THROW(dw::hardy_check(params(1.0, 0.0), 1.0, bad), dw::ConfigError);
  EXPECT_THROW(dw::hardy_check(params(1.0, 0.0), 2.0, dw::make_test_function(dw::HardyFamily::Linear, 2.0)),
               dw::ConfigError);
  EXPECT_THROW(dw::make_test_function(dw::HardyFamily::LinearTimesPower, 1.0, 0.5), dw::ConfigError);
}
