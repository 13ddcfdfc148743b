#include "degenwave/hum_control.hpp"

#include <cmath>
#include <string>
#include <tuple>

#include "degenwave/error.hpp"
#include "degenwave/observability.hpp"
#include "degenwave/weight_model.hpp"

namespace degenwave {

namespace {

void check_problem(const HUMProblem& p) {
  if (p.op == nullptr || p.basis == nullptr) throw ConfigError("HUMProblem needs an operator and a basis");
  if (p.basis->interior_count() != p.op->size()) throw ConfigError("HUMProblem: basis does not match operator");
  if (p.basis->size() == 0) throw ConfigError("HUMProblem: empty basis");
  if (p.phi0.size() != p.op->size() || p.phi1.size() != p.op->size()) {
    throw ConfigError("HUMProblem: target data must have one entry per interior node");
  }
  if (!(p.T > 0.0)) throw ConfigError("HUMProblem: T must be positive");
  if (p.dt < 0.0) throw ConfigError("HUMProblem: dt must be nonnegative");
  if (!(p.tolerance > 0.0)) throw ConfigError("HUMProblem: tolerance must be positive");
  if (p.max_iterations < 1) throw ConfigError("HUMProblem: max_iterations must be at least 1");
}

// ||r||^2 in the energy norm of the state it represents: r = (p, q) stands
// for a displacement error q and a velocity error p.
double energy_norm2(const Eigen::VectorXd& r, const Eigen::VectorXd& lambda) {
  const Index m = lambda.size();
  return r.head(m).squaredNorm() + (lambda.array() * r.tail(m).array().square()).sum();
}

double filtered_energy(const EigenBasis& basis, const Eigen::VectorXd& y, const Eigen::VectorXd& v) {
  const Eigen::VectorXd a = project(basis, y);
  const Eigen::VectorXd b = project(basis, v);
  return 0.5 * (b.squaredNorm() + (basis.eigenvalues.array() * a.array().square()).sum());
}

}  // namespace

double hum_time_step(const HUMProblem& problem) {
  check_problem(problem);
  const double dt = problem.dt > 0.0 ? problem.dt : 0.5 * cfl_limit(*problem.op);
  return problem.T / step_count(problem.T, dt);
}

Eigen::VectorXd hum_apply(const HUMProblem& problem, const Eigen::VectorXd& sigma, Eigen::MatrixXd* control) {
  check_problem(problem);
  const EigenBasis& basis = *problem.basis;
  const OperatorMatrix& op = *problem.op;
  const Index m = basis.size();
  if (sigma.size() != 2 * m) throw ConfigError("hum_apply: sigma must hold 2 x (number of modes) coefficients");
  const double dt = hum_time_step(problem);
  const auto support = gamma0(op.grid);

  const SolveOptions quiet{false};
  const SolutionRecord psi = solve_leapfrog(op, synthesize(basis, sigma.head(m)), synthesize(basis, sigma.tail(m)),
                                            Forcing::zero(), problem.T, dt, quiet);
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(psi.flux.conormal.rows(), psi.flux.conormal.cols());
  for (Index b : support) u.row(b) = psi.flux.conormal.row(b);

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(op.size());
  const SolutionRecord y = solve_controlled(op, u, zero, zero, Direction::Backward, problem.T, dt, support, quiet);

  Eigen::VectorXd out(2 * m);
  out.head(m) = project(basis, y.initial.velocity);
  out.tail(m) = -project(basis, y.initial.displacement);
  if (control != nullptr) *control = std::move(u);
  return out;
}

Eigen::VectorXd hum_rhs(const HUMProblem& problem) {
  check_problem(problem);
  const Index m = problem.basis->size();
  Eigen::VectorXd rhs(2 * m);
  rhs.head(m) = project(*problem.basis, problem.phi1);
  rhs.tail(m) = -project(*problem.basis, problem.phi0);
  return rhs;
}

Eigen::MatrixXd hum_matrix(const HUMProblem& problem) {
  check_problem(problem);
  const Index n = 2 * problem.basis->size();
  Eigen::MatrixXd L(n, n);
  for (Index j = 0; j < n; ++j) L.col(j) = hum_apply(problem, Eigen::VectorXd::Unit(n, j));
  return L;
}

std::pair<double, double> hum_verify(const HUMProblem& problem, const Eigen::MatrixXd& control) {
  check_problem(problem);
  const EigenBasis& basis = *problem.basis;
  const OperatorMatrix& op = *problem.op;
  const Eigen::VectorXd y0 = synthesize(basis, project(basis, problem.phi0));
  const Eigen::VectorXd y1 = synthesize(basis, project(basis, problem.phi1));
  const double e0 = filtered_energy(basis, y0, y1);
  if (e0 == 0.0) return {0.0, 0.0};
  const SolutionRecord run = solve_controlled(op, control, y0, y1, Direction::Forward, problem.T,
                                              hum_time_step(problem), gamma0(op.grid), SolveOptions{false});
  const double filtered = filtered_energy(basis, run.final.displacement, run.final.velocity);
  const double full = 0.5 * (l2_inner(op.grid, run.final.velocity, run.final.velocity) +
                             energy_form(op, run.final.displacement, run.final.displacement));
  return {filtered / e0, full / e0};
}

HUMResult hum_solve(const HUMProblem& problem) {
  check_problem(problem);
  const OperatorMatrix& op = *problem.op;
  const EigenBasis& basis = *problem.basis;
  if (!op.params) throw ConfigError("hum_solve needs an operator assembled from WeightParams");
  const MultiplierConstants k = constants(*op.params, op.grid);
  if (!(problem.T > k.T_star)) {
    throw ConfigError("control time T = " + std::to_string(problem.T) + " must exceed T* = 2b/a = " +
                      std::to_string(k.T_star));
  }

  const Index m = basis.size();
  const Eigen::VectorXd& lambda = basis.eigenvalues;
  HUMResult res;
  res.T = problem.T;
  res.dt = hum_time_step(problem);
  res.gamma = problem.gamma;
  res.face_element = op.grid.face_element();
  res.support = gamma0(op.grid);
  const int steps = step_count(problem.T, res.dt);
  for (int j = 0; j <= steps; ++j) res.times.push_back(j == steps ? problem.T : j * res.dt);
  res.control = Eigen::MatrixXd::Zero(op.grid.boundary_count(), steps + 1);
  res.sigma0 = Eigen::VectorXd::Zero(m);
  res.sigma1 = Eigen::VectorXd::Zero(m);

  const Eigen::VectorXd rhs = hum_rhs(problem);
  const double rhs_norm = std::sqrt(energy_norm2(rhs, lambda));
  res.initial_energy = 0.5 * rhs_norm * rhs_norm;
  res.residual_history.push_back(rhs_norm == 0.0 ? 0.0 : 1.0);
  res.functional_history.push_back(0.0);
  if (rhs_norm == 0.0) {
    res.converged = true;
    return res;
  }

  // M^{-1} = diag(1 / lambda, 1) maps the dual residual to the state it
  // represents; CG then runs in the energy pairing.
  Eigen::VectorXd precond(2 * m);
  precond.head(m) = lambda.cwiseInverse();
  precond.tail(m).setOnes();

  Eigen::VectorXd sigma = Eigen::VectorXd::Zero(2 * m);
  Eigen::VectorXd r = rhs;
  Eigen::VectorXd z = precond.cwiseProduct(r);
  Eigen::VectorXd d = z;
  double rz = r.dot(z);
  for (int it = 1; it <= problem.max_iterations; ++it) {
    const Eigen::VectorXd Ld = hum_apply(problem, d);
    const double curvature = d.dot(Ld);
    if (!(curvature > 0.0)) throw SolverError("HUM operator is not positive definite on the filtered span");
    const double step = rz / curvature;
    sigma += step * d;
    r -= step * Ld;
    res.iterations = it;
    const double rel = std::sqrt(energy_norm2(r, lambda)) / rhs_norm;
    res.residual_history.push_back(rel);
    res.functional_history.push_back(-0.5 * sigma.dot(rhs + r));
    if (rel <= problem.tolerance) {
      res.converged = true;
      break;
    }
    z = precond.cwiseProduct(r);
    const double rz_next = r.dot(z);
    d = z + (rz_next / rz) * d;
    rz = rz_next;
  }

  res.sigma0 = sigma.head(m);
  res.sigma1 = sigma.tail(m);
  hum_apply(problem, sigma, &res.control);
  std::tie(res.terminal_energy_ratio, res.unfiltered_ratio) = hum_verify(problem, res.control);
  return res;
}

double control_cost(const HUMResult& result) {
  if (result.control.size() == 0) return 0.0;
  const Index samples = result.control.cols();
  if (static_cast<Index>(result.times.size()) != samples) throw ConfigError("control_cost: time grid mismatch");
  if (samples < 2) return 0.0;
  double cost = 0.0;
  for (Index k = 0; k < samples; ++k) {
    const double w = (k == 0 || k == samples - 1) ? 0.5 * result.dt : result.dt;
    cost += w * result.control.col(k).squaredNorm();
  }
  return cost * result.face_element;
}

}  // namespace degenwave
