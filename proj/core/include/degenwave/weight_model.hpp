#pragma once

#include <span>
#include <utility>
#include <vector>

namespace degenwave {

class Grid;

/// Degenerate weight w(x) = |x|^alpha on the box (-L, L)^N together with its
/// polynomial regularization w_eps = psi_eps(|x|)^alpha.
///
/// `epsilon == 0` selects the unregularized weight.
struct WeightParams {
  double alpha = 1.0;
  double epsilon = 0.0;
  int dimension = 2;
  double half_width = 1.0;
  double R0 = 0.12;

  /// Throws ConfigError when a field is out of range.
  void validate() const;

  /// M = sup_{x in box} |x| + 1 = sqrt(N) L + 1.
  double sup_radius_plus_one() const;

  /// True when 0 < epsilon < R0, the regime in which the regularized
  /// family is analysed. epsilon up to L/4 is still accepted by validate().
  bool regularizer_in_reference_range() const;

  WeightParams with_epsilon(double eps) const {
    WeightParams p = *this;
    p.epsilon = eps;
    return p;
  }
};

inline constexpr double kAlphaMin = 0.05;
inline constexpr double kAlphaMax = 1.95;

struct MultiplierConstants {
  double a = 0.0;       // multiplier floor
  double hat_a = 0.0;   // lower bound of the quartic in the regularized ball
  double b = 0.0;       // sup of |x| / sqrt(w_eps)
  double c = 0.0;       // N^2 - a^2
  double P = 0.0;       // N - a
  double theta = 0.0;   // sup over the boundary of (x . nu) / |x|^alpha
  double T_star = 0.0;  // 2 b / a
  double M = 0.0;       // sup |x| + 1 over the grid's closure

  /// 2 (aT - 2b) / theta: lower bound on the weighted flux quotient.
  double weighted_observability_constant(double T, double alpha) const;
  /// 2 (aT - 2b) / (theta M^{2 alpha}): lower bound on the unweighted quotient.
  double observability_constant(double T, double alpha) const;
};

// Radial profile of the regularizer and its first two derivatives in r.
double psi(const WeightParams& params, double r);
double psi_prime(const WeightParams& params, double r);
double psi_second(const WeightParams& params, double r);

std::vector<double> psi_gradient(const WeightParams& params, std::span<const double> x);

double weight(const WeightParams& params, std::span<const double> x);
double radial_weight(const WeightParams& params, double r);

std::vector<double> weight_gradient(const WeightParams& params, std::span<const double> x);

/// m_eps(x) = 1 - (alpha/2) psi^{-1} (x . grad psi); bounded below by `a`.
double multiplier_factor(const WeightParams& params, std::span<const double> x);
double radial_multiplier_factor(const WeightParams& params, double r);

double multiplier_floor(double alpha);
double quartic_floor(double alpha, double epsilon);

/// a, hat_a, b, c, P, theta and T* for the given weight on the given grid.
/// b is maximized over every node of the closed grid and theta over the
/// boundary face nodes.
MultiplierConstants constants(const WeightParams& params, const Grid& grid);

/// Surface measure of the unit sphere in R^N.
double unit_sphere_area(int dimension);

/// (w(B_r), w_eps(B_r)) by radial quadrature.
std::pair<double, double> weight_measure(const WeightParams& params, double radius);

}  // namespace degenwave
