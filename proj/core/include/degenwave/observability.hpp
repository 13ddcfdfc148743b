#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "degenwave/discretization.hpp"
#include "degenwave/spectral.hpp"
#include "degenwave/wave_solver.hpp"
#include "degenwave/weight_model.hpp"

namespace degenwave {

/// Boundary nodes with x . nu > 0 (relative to the origin, where the weight degenerates).
std::vector<Index> gamma0(const Grid& grid);

/// sum over `subset` of the trapezoidal time integral of flux^2, times h^(N-1).
double flux_integral(const Eigen::MatrixXd& flux, const std::vector<double>& times, const std::vector<Index>& subset,
                     const Grid& grid);

struct ObservabilityConfig {
  double T = 8.0;
  int steps = 2000;
  double gamma = 0.5;   // mode filter sqrt(lambda) h <= gamma
  double slack = 0.05;  // measured quotient must reach (1 - slack) x bound
};

struct ObservabilityReport {
  double alpha = 0.0;
  double epsilon = 0.0;
  int dimension = 2;
  int nodes_per_axis = 0;
  double T = 0.0;
  double gamma = 0.0;
  Index modes = 0;
  double slack = 0.0;
  double energy0 = 0.0;
  double flux_integral = 0.0;           // unweighted, over Gamma_0
  double weighted_flux_integral = 0.0;  // conormal w dphi/dnu, over Gamma_0
  double quotient = 0.0;
  double weighted_quotient = 0.0;
  double predicted = 0.0;           // 2 (aT - 2b) / (theta M^{2 alpha})
  double weighted_predicted = 0.0;  // 2 (aT - 2b) / theta
  bool pass = false;                // quotient >= (1 - slack) predicted
  bool weighted_pass = false;
  bool strict_pass = false;  // both quotients >= their bounds without slack
};

/// Runs the homogeneous system from the filtered projection of (phi0, phi1)
/// and compares the boundary observation with the multiplier bounds.
/// Rejects T <= T*.
ObservabilityReport observability_experiment(const OperatorMatrix& op, const EigenBasis& filtered,
                                             const MultiplierConstants& k, const Eigen::VectorXd& phi0,
                                             const Eigen::VectorXd& phi1, const ObservabilityConfig& config);

/// Random smooth data in the span of `basis`: coefficients of phi0 scale like
/// 1 / (1 + lambda), those of phi1 like 1 / sqrt(1 + lambda).
std::pair<Eigen::VectorXd, Eigen::VectorXd> random_filtered_data(const EigenBasis& basis, std::mt19937_64& rng);

/// C-infinity bump exp(1 - 1 / (1 - (|x - c| / radius)^2)), zero outside the ball.
Eigen::VectorXd smooth_bump(const Grid& grid, const Point& center, double radius);

struct ApproximationSweep {
  std::vector<double> epsilons;
  std::vector<double> solution_distance;  // ||phi_eps - phi||_{L2(Q)}
  std::vector<double> flux_distance;      // ||dphi_eps/dnu - dphi/dnu||_{L2(dQ)}
  std::vector<double> energy;             // E_eps(0)
  std::vector<double> energy_gap;         // E_eps(0) - E(0)
  std::vector<double> energy_gap_bound;   // 2 eps^alpha int_{B_eps} |grad phi0|^2
  std::vector<double> measure;            // w_eps(B_eps)
  std::vector<double> measure_bound;      // eps^alpha |B_eps|
  double reference_energy = 0.0;          // E(0)
  double dt = 0.0;
};

struct ApproximationConfig {
  double T = 8.0;
  double dt = 0.0;  // 0 picks half the most restrictive CFL step
};

/// Runs the regularized problems and the degenerate one on the same grid
/// and time grid. Rejects epsilon < 1.5 h.
ApproximationSweep approximation_sweep(const WeightParams& base, const Grid& grid, const Eigen::VectorXd& phi0,
                                       const Eigen::VectorXd& phi1, const std::vector<double>& epsilons,
                                       const ApproximationConfig& config);

/// Discrete int_{B_eps} |grad phi|^2 over edges whose midpoint lies in B_eps.
double ball_gradient_energy(const Grid& grid, const Eigen::VectorXd& phi, double radius);

/// Relative residual of P [<phi_t, phi>]_0^T = P int (||phi_t||^2 - phi^T A phi h^N) dt.
/// Rejects P that is not finite.
double multiplier_identity_residual(const SolutionRecord& record, double P);

struct ModeIdentityTerms {
  double integral = 0.0;  // int_0^T (d'^2 - lambda d^2) dt
  double boundary = 0.0;  // d'(T) d(T) - d'(0) d(0)
};

/// Closed-form terms for d = d0 cos(wt) + d1 sin(wt) / w.
ModeIdentityTerms mode_identity_closed_form(double lambda, double d0, double d1, double T);

}  // namespace degenwave
