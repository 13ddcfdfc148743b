#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "degenwave/discretization.hpp"
#include "degenwave/spectral.hpp"

namespace degenwave {

/// Right-hand side of the semi-discrete wave equation: zero, constant in
/// time, or sampled on the solver's time grid (one column per sample).
class Forcing {
 public:
  enum class Kind { Zero, Constant, Sampled };

  static Forcing zero() { return Forcing(Kind::Zero, {}, {}); }
  static Forcing constant(Eigen::VectorXd f) { return Forcing(Kind::Constant, std::move(f), {}); }
  static Forcing sampled(Eigen::MatrixXd samples) { return Forcing(Kind::Sampled, {}, std::move(samples)); }

  Kind kind() const { return kind_; }
  const Eigen::VectorXd& constant_value() const { return constant_; }
  const Eigen::MatrixXd& samples() const { return samples_; }

  /// Forcing at time sample k, as a vector of length `size`.
  Eigen::VectorXd at(Index k, Index size) const;
  void check(Index size, Index samples) const;

 private:
  Forcing(Kind kind, Eigen::VectorXd c, Eigen::MatrixXd s)
      : kind_(kind), constant_(std::move(c)), samples_(std::move(s)) {}
  Kind kind_;
  Eigen::VectorXd constant_;
  Eigen::MatrixXd samples_;
};

struct WaveState {
  double time = 0.0;
  Eigen::VectorXd displacement;
  Eigen::VectorXd velocity;
};

/// kinetic = 1/2 ||v||^2_{L2,h}, potential = 1/2 phi^T A phi h^N.
struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> kinetic;
  std::vector<double> potential;
  std::vector<double> total;
};

/// Rows are boundary nodes, columns time samples.
struct BoundaryFluxTrace {
  std::vector<double> times;
  Eigen::MatrixXd flux;           // second-order outward derivative
  Eigen::MatrixXd weighted_flux;  // flux multiplied by w at the node
  Eigen::MatrixXd conormal;       // first-order w(mid) derivative, adjoint of boundary_lift
};

/// Mode coefficients d_n(t_k) and d_n'(t_k); rows are modes.
struct ModeTrajectories {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd coefficient;
  Eigen::MatrixXd derivative;
};

struct SolutionRecord {
  std::vector<double> times;
  double dt = 0.0;
  double volume_element = 1.0;  // h^N of the grid the record lives on
  WaveState initial;
  WaveState final;
  Eigen::MatrixXd displacement;  // interior x samples, empty unless stored
  Eigen::MatrixXd velocity;
  EnergyTrace energy;
  BoundaryFluxTrace flux;
  std::optional<ModeTrajectories> modes;
};

struct SolveOptions {
  bool store_states = true;
};

/// Galerkin solution in the span of `basis`: every mode is integrated in
/// closed form (Duhamel with trapezoidal quadrature for sampled forcing).
/// The time grid has steps + 1 samples on [0, T].
SolutionRecord solve_spectral(const OperatorMatrix& op, const EigenBasis& basis, const Eigen::VectorXd& phi0,
                              const Eigen::VectorXd& phi1, const Forcing& f, double T, int steps,
                              const SolveOptions& options = {});

/// Largest admissible leapfrog step, 0.9 * 2 / sqrt(lambda_max).
double cfl_limit(const OperatorMatrix& op);

/// Number of uniform steps used for horizon T with requested step dt
/// (the smallest count whose step does not exceed dt).
int step_count(double T, double dt);

/// Central-difference time stepping. The step is T / step_count(T, dt); the
/// first step uses the Taylor start phi0 + dt phi1 + dt^2/2 (f(0) - A phi0),
/// velocities are centered differences.
SolutionRecord solve_leapfrog(const OperatorMatrix& op, const Eigen::VectorXd& phi0, const Eigen::VectorXd& phi1,
                              const Forcing& f, double T, double dt, const SolveOptions& options = {});

enum class Direction { Forward, Backward };

/// Leapfrog for y'' + A y = boundary_lift(u(t)). `control` has one row per
/// boundary node and one column per time sample. Forward integrates from
/// the given state at t = 0, Backward from the given state at t = T.
/// Rows of nodes outside `support` must be zero; an empty support means
/// the whole boundary.
SolutionRecord solve_controlled(const OperatorMatrix& op, const Eigen::MatrixXd& control,
                                const Eigen::VectorXd& displacement, const Eigen::VectorXd& velocity,
                                Direction direction, double T, double dt, const std::vector<Index>& support = {},
                                const SolveOptions& options = {});

/// Test function s(t) v(x) for the weak formulation; s(T) = s'(T) = 0.
struct SeparableTest {
  std::function<double(double)> s;
  std::function<double(double)> ds;
  std::function<double(double)> dds;
  Eigen::VectorXd v;
};

/// |LHS - RHS| / (|LHS| + |RHS| + tiny) for
///   int int phi s'' v + int s <phi, A v>  =  int s <f, v> + s(0) <phi1, v> - s'(0) <phi0, v>,
/// with trapezoidal time quadrature on the record's samples.
double weak_residual(const OperatorMatrix& op, const SolutionRecord& record, const SeparableTest& test,
                     const Forcing& f = Forcing::zero());

}  // namespace degenwave
