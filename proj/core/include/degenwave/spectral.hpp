#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "degenwave/discretization.hpp"
#include "degenwave/weight_model.hpp"

namespace degenwave {

/// Smallest eigenpairs of a discrete operator. Eigenvectors are columns,
/// orthonormal in the discrete L2 product (weight h^N).
struct EigenBasis {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  /// ||A v - lambda v||_2 for the Euclidean-normalized vector v.
  Eigen::VectorXd residuals;
  double volume_element = 1.0;
  std::optional<WeightParams> params;

  Index size() const { return eigenvalues.size(); }
  Index interior_count() const { return eigenvectors.rows(); }
};

enum class EigenMethod { Auto, Dense, Lanczos };

struct EigenOptions {
  EigenMethod method = EigenMethod::Auto;
  /// Auto switches to block Lanczos above this many unknowns.
  Index dense_limit = 1500;
  double tolerance = 1e-11;  // relative residual target for Lanczos
  int block_size = 8;
  std::uint64_t seed = 20240917;
};

/// The m smallest eigenpairs in ascending order, signs fixed so the first
/// component that is not negligible is positive.
EigenBasis compute_eigs(const OperatorMatrix& op, Index m, const EigenOptions& options = {});

/// Leading modes with sqrt(lambda) h <= gamma.
EigenBasis filter_modes(const EigenBasis& basis, double gamma, double h);

/// Every mode with sqrt(lambda) h <= gamma; grows the request until the cut is found.
EigenBasis compute_filtered_eigs(const OperatorMatrix& op, double gamma, const EigenOptions& options = {});

EigenBasis truncate(const EigenBasis& basis, Index m);

/// Coefficients <phi, Phi_i>_{L2,h}.
Eigen::VectorXd project(const EigenBasis& basis, const Eigen::VectorXd& phi);
Eigen::VectorXd synthesize(const EigenBasis& basis, const Eigen::VectorXd& coefficients);

/// max |<Phi_i, Phi_j>_{L2,h} - delta_ij|.
double gram_residual(const EigenBasis& basis);
/// max |<Phi_i, A Phi_j>_h - delta_ij lambda_i| / lambda_max.
double weighted_gram_residual(const OperatorMatrix& op, const EigenBasis& basis);

struct SeriesIdentityReport {
  double energy_direct = 0.0;   // phi^T A phi h^N
  double energy_series = 0.0;   // sum u_i^2 lambda_i
  double energy_residual = 0.0;
  double image_direct = 0.0;    // ||A phi||_{L2,h}
  double image_series = 0.0;    // (sum u_i^2 lambda_i^2)^(1/2)
  double image_residual = 0.0;
};

/// Checks the series expansions of the energy norm and of A phi after
/// projecting phi onto the basis.
SeriesIdentityReport series_identities_check(const OperatorMatrix& op, const EigenBasis& basis,
                                             const Eigen::VectorXd& phi);

// --- Hardy and Poincare inequalities on balls, by radial quadrature ---

struct RadialTestFunction {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

enum class HardyFamily { Linear, LinearTimesPower, Quadratic };

/// (R - r), (R - r) r^beta, (R^2 - r^2).
RadialTestFunction make_test_function(HardyFamily family, double R, double beta = 1.0);
std::vector<RadialTestFunction> standard_test_family(double R);

struct HardyReport {
  std::string function;
  double hardy_lhs = 0.0;     // (N - 2 + alpha)^2 int rho^(alpha-2) u^2
  double hardy_rhs = 0.0;     // 4 int rho^alpha |u'|^2
  double hardy_ratio = 0.0;
  double poincare_lhs = 0.0;  // int u^2
  double poincare_rhs = 0.0;  // 4 M^(2-alpha) / (N-2+alpha)^2 int w |u'|^2
  double poincare_ratio = 0.0;
};

/// rho is |x| when epsilon = 0 and psi_eps(|x|) otherwise. Rejects test
/// functions that do not vanish at r = R.
HardyReport hardy_check(const WeightParams& params, double R, const RadialTestFunction& u);
std::vector<HardyReport> hardy_check(double alpha, double epsilon, int dimension, HardyFamily family,
                                     double R = 1.0);

}  // namespace degenwave
