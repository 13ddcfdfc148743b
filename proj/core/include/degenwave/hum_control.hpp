#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "degenwave/discretization.hpp"
#include "degenwave/spectral.hpp"
#include "degenwave/wave_solver.hpp"

namespace degenwave {

/// Null-control problem on the span of `basis` (the filtered modes). The
/// operator must come from WeightParams so that T* can be computed.
/// Adjoint data sigma are stacked mode coefficients [a; b] of (psi0, psi1).
struct HUMProblem {
  const OperatorMatrix* op = nullptr;
  const EigenBasis* basis = nullptr;
  double T = 8.0;
  double dt = 0.0;  // 0 picks half the CFL step
  Eigen::VectorXd phi0;
  Eigen::VectorXd phi1;
  double gamma = 0.5;        // recorded; the basis is expected to be filtered with it
  double tolerance = 1e-6;   // relative energy-norm residual
  int max_iterations = 200;
};

struct HUMResult {
  Eigen::MatrixXd control;     // boundary nodes x time samples, zero off Gamma_0
  std::vector<double> times;
  std::vector<Index> support;  // Gamma_0
  double dt = 0.0;
  double T = 0.0;
  double gamma = 0.0;
  double face_element = 1.0;   // h^(N-1)
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;    // relative energy-norm residuals, entry 0 is the start
  std::vector<double> functional_history;  // J(sigma) = 1/2 <Lambda sigma, sigma> - <rhs, sigma>
  Eigen::VectorXd sigma0;                  // adjoint minimizer, mode coefficients
  Eigen::VectorXd sigma1;
  double initial_energy = 0.0;             // energy of the filtered target data
  double terminal_energy_ratio = 0.0;      // filtered E(T) / E(0) of the closed-loop run
  double unfiltered_ratio = 0.0;           // full-grid E(T) / E(0), reported only
};

/// Time step and sample count used by every solve of the problem.
double hum_time_step(const HUMProblem& problem);

/// Lambda sigma = (Phi^T y'(0), -Phi^T y(0)) with y the backward controlled
/// solve from rest at T driven by the conormal flux of the forward solve from
/// sigma (restricted to Gamma_0). Optionally returns that control.
Eigen::VectorXd hum_apply(const HUMProblem& problem, const Eigen::VectorXd& sigma,
                          Eigen::MatrixXd* control = nullptr);

/// Target (Phi^T phi1, -Phi^T phi0).
Eigen::VectorXd hum_rhs(const HUMProblem& problem);

/// Dense Lambda obtained by applying hum_apply to every unit vector.
Eigen::MatrixXd hum_matrix(const HUMProblem& problem);

/// Preconditioned conjugate gradient on Lambda sigma = rhs in the energy
/// pairing, then a forward closed-loop verification run. Rejects T <= T*.
HUMResult hum_solve(const HUMProblem& problem);

/// Filtered and full-grid E(T)/E(0) of the forward run from the filtered
/// projection of the target data driven by `control`.
std::pair<double, double> hum_verify(const HUMProblem& problem, const Eigen::MatrixXd& control);

/// int int_{Sigma_0} u^2 with trapezoidal weights in time.
double control_cost(const HUMResult& result);

}  // namespace degenwave
