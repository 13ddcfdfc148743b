#include "degenwave/observability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "degenwave/error.hpp"

namespace degenwave {

std::vector<Index> gamma0(const Grid& grid) {
  std::vector<Index> subset;
  const auto& boundary = grid.boundary();
  for (std::size_t b = 0; b < boundary.size(); ++b) {
    double xn = 0.0;
    for (int d = 0; d < grid.dimension(); ++d) xn += boundary[b].position[d] * boundary[b].normal[d];
    if (xn > 0.0) subset.push_back(static_cast<Index>(b));
  }
  if (subset.empty()) throw ConfigError("gamma0: no boundary node has x . nu > 0");
  return subset;
}

double flux_integral(const Eigen::MatrixXd& flux, const std::vector<double>& times, const std::vector<Index>& subset,
                     const Grid& grid) {
  if (flux.cols() != static_cast<Index>(times.size())) throw ConfigError("flux_integral: time grid mismatch");
  if (flux.rows() != grid.boundary_count()) throw ConfigError("flux_integral: trace is not on this grid");
  double total = 0.0;
  for (Index b : subset) {
    double row = 0.0;
    for (Index k = 0; k + 1 < flux.cols(); ++k) {
      const double dt = times[static_cast<std::size_t>(k + 1)] - times[static_cast<std::size_t>(k)];
      row += 0.5 * dt * (flux(b, k) * flux(b, k) + flux(b, k + 1) * flux(b, k + 1));
    }
    total += row;
  }
  return total * grid.face_element();
}

ObservabilityReport observability_experiment(const OperatorMatrix& op, const EigenBasis& filtered,
                                             const MultiplierConstants& k, const Eigen::VectorXd& phi0,
                                             const Eigen::VectorXd& phi1, const ObservabilityConfig& config) {
  if (!op.params) throw ConfigError("observability_experiment needs an operator assembled from WeightParams");
  if (!(config.T > k.T_star)) {
    throw ConfigError("observation time T = " + std::to_string(config.T) + " must exceed T* = 2b/a = " +
                      std::to_string(k.T_star));
  }
  const WeightParams& params = *op.params;
  const Eigen::VectorXd y0 = synthesize(filtered, project(filtered, phi0));
  const Eigen::VectorXd y1 = synthesize(filtered, project(filtered, phi1));

  ObservabilityReport rep;
  rep.alpha = params.alpha;
  rep.epsilon = params.epsilon;
  rep.dimension = op.grid.dimension();
  rep.nodes_per_axis = op.grid.nodes_per_axis();
  rep.T = config.T;
  rep.gamma = config.gamma;
  rep.modes = filtered.size();
  rep.slack = config.slack;
  rep.energy0 = 0.5 * (l2_inner(op.grid, y1, y1) + energy_form(op, y0, y0));
  if (!(rep.energy0 > 0.0)) throw ConfigError("observability_experiment: data has zero energy in the filtered span");

  const SolutionRecord rec =
      solve_spectral(op, filtered, y0, y1, Forcing::zero(), config.T, config.steps, SolveOptions{false});
  const auto subset = gamma0(op.grid);
  rep.flux_integral = flux_integral(rec.flux.flux, rec.times, subset, op.grid);
  rep.weighted_flux_integral = flux_integral(rec.flux.weighted_flux, rec.times, subset, op.grid);
  rep.quotient = rep.flux_integral / rep.energy0;
  rep.weighted_quotient = rep.weighted_flux_integral / rep.energy0;
  rep.predicted = k.observability_constant(config.T, params.alpha);
  rep.weighted_predicted = k.weighted_observability_constant(config.T, params.alpha);
  rep.pass = rep.quotient >= (1.0 - config.slack) * rep.predicted;
  rep.weighted_pass = rep.weighted_quotient >= (1.0 - config.slack) * rep.weighted_predicted;
  rep.strict_pass = rep.quotient >= rep.predicted && rep.weighted_quotient >= rep.weighted_predicted;
  return rep;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> random_filtered_data(const EigenBasis& basis, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::VectorXd a(basis.size()), b(basis.size());
  for (Index n = 0; n < basis.size(); ++n) {
    const double lambda = basis.eigenvalues[n];
    a[n] = gauss(rng) / (1.0 + lambda);
    b[n] = gauss(rng) / std::sqrt(1.0 + lambda);
  }
  return {synthesize(basis, a), synthesize(basis, b)};
}

Eigen::VectorXd smooth_bump(const Grid& grid, const Point& center, double radius) {
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(grid.interior_count());
  for (Index p = 0; p < grid.interior_count(); ++p) {
    Point x = grid.position(p);
    for (int d = 0; d < grid.dimension(); ++d) x[d] -= center[d];
    const double s = norm(x, grid.dimension()) / radius;
    if (s < 1.0) phi[p] = std::exp(1.0 - 1.0 / (1.0 - s * s));
  }
  return phi;
}

double ball_gradient_energy(const Grid& grid, const Eigen::VectorXd& phi, double radius) {
  const int N = grid.dimension();
  const int n = grid.nodes_per_axis();
  const double h = grid.spacing();
  double total = 0.0;
  auto inside = [&](const Point& m) { return norm(m, N) < radius; };
  for (Index p = 0; p < grid.interior_count(); ++p) {
    const auto idx = grid.multi_index(p);
    Point x = grid.position(p);
    for (int d = 0; d < N; ++d) {
      const double xd = x[d];
      x[d] = grid.edge_midpoint(d, idx[d]);
      if (inside(x)) {
        double upper = 0.0;
        if (idx[d] + 1 < n) {
          auto jdx = idx;
          jdx[d] += 1;
          upper = phi[grid.flat_index(jdx)];
        }
        const double g = (upper - phi[p]) / h;
        total += g * g;
      }
      if (idx[d] == 0) {
        x[d] = grid.edge_midpoint(d, -1);
        if (inside(x)) total += (phi[p] / h) * (phi[p] / h);
      }
      x[d] = xd;
    }
  }
  return total * grid.volume_element();
}

ApproximationSweep approximation_sweep(const WeightParams& base, const Grid& grid, const Eigen::VectorXd& phi0,
                                       const Eigen::VectorXd& phi1, const std::vector<double>& epsilons,
                                       const ApproximationConfig& config) {
  const double h = grid.spacing();
  for (double eps : epsilons) {
    if (eps < 1.5 * h) {
      throw ConfigError("approximation_sweep: epsilon " + std::to_string(eps) +
                        " is not resolved by the grid (need epsilon >= 1.5 h = " + std::to_string(1.5 * h) + ")");
    }
    base.with_epsilon(eps).validate();
  }
  const WeightParams raw = base.with_epsilon(0.0);
  const OperatorMatrix reference = assemble_operator(grid, raw);
  std::vector<OperatorMatrix> regularized;
  double dt = config.dt;
  double limit = cfl_limit(reference);
  for (double eps : epsilons) {
    regularized.push_back(assemble_operator(grid, base.with_epsilon(eps)));
    limit = std::min(limit, cfl_limit(regularized.back()));
  }
  if (dt == 0.0) dt = 0.5 * limit;

  ApproximationSweep sweep;
  sweep.epsilons = epsilons;
  const SolutionRecord ref = solve_leapfrog(reference, phi0, phi1, Forcing::zero(), config.T, dt);
  sweep.dt = ref.dt;
  sweep.reference_energy = 0.5 * (l2_inner(grid, phi1, phi1) + energy_form(reference, phi0, phi0));

  const Index samples = static_cast<Index>(ref.times.size());
  auto trapezoid = [&](const Eigen::VectorXd& per_sample) {
    double s = 0.0;
    for (Index k = 0; k + 1 < samples; ++k) s += 0.5 * ref.dt * (per_sample[k] + per_sample[k + 1]);
    return s;
  };

  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    const double eps = epsilons[i];
    const OperatorMatrix& op = regularized[i];
    const SolutionRecord rec = solve_leapfrog(op, phi0, phi1, Forcing::zero(), config.T, ref.dt * (1.0 + 1e-12));
    if (static_cast<Index>(rec.times.size()) != samples) throw SolverError("approximation_sweep: time grids differ");

    const Eigen::VectorXd state_gap =
        (rec.displacement - ref.displacement).colwise().squaredNorm().transpose() * grid.volume_element();
    const Eigen::VectorXd flux_gap =
        (rec.flux.flux - ref.flux.flux).colwise().squaredNorm().transpose() * grid.face_element();
    sweep.solution_distance.push_back(std::sqrt(trapezoid(state_gap)));
    sweep.flux_distance.push_back(std::sqrt(trapezoid(flux_gap)));

    const double energy = 0.5 * (l2_inner(grid, phi1, phi1) + energy_form(op, phi0, phi0));
    sweep.energy.push_back(energy);
    sweep.energy_gap.push_back(energy - sweep.reference_energy);
    sweep.energy_gap_bound.push_back(2.0 * std::pow(eps, base.alpha) * ball_gradient_energy(grid, phi0, eps));

    const WeightParams p = base.with_epsilon(eps);
    sweep.measure.push_back(weight_measure(p, eps).second);
    const double ball = unit_sphere_area(grid.dimension()) * std::pow(eps, grid.dimension()) / grid.dimension();
    sweep.measure_bound.push_back(std::pow(eps, base.alpha) * ball);
  }
  return sweep;
}

double multiplier_identity_residual(const SolutionRecord& record, double P) {
  if (!std::isfinite(P)) throw ConfigError("multiplier_identity_residual: P must be a finite constant");
  const double vol = record.volume_element;
  const double lhs =
      P * (record.final.velocity.dot(record.final.displacement) - record.initial.velocity.dot(record.initial.displacement)) *
      vol;
  double integral = 0.0;
  const auto& e = record.energy;
  for (std::size_t k = 0; k + 1 < record.times.size(); ++k) {
    const double dt = record.times[k + 1] - record.times[k];
    const double a = 2.0 * (e.kinetic[k] - e.potential[k]);
    const double b = 2.0 * (e.kinetic[k + 1] - e.potential[k + 1]);
    integral += 0.5 * dt * (a + b);
  }
  const double rhs = P * integral;
  const double scale = std::abs(lhs) + std::abs(rhs);
  return scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
}

ModeIdentityTerms mode_identity_closed_form(double lambda, double d0, double d1, double T) {
  const double w = std::sqrt(lambda);
  const double A = d0, B = d1 / w;
  ModeIdentityTerms t;
  t.integral = 0.5 * w * ((B * B - A * A) * std::sin(2.0 * w * T) - 2.0 * A * B * (1.0 - std::cos(2.0 * w * T)));
  const double dT = A * std::cos(w * T) + B * std::sin(w * T);
  const double ddT = w * (-A * std::sin(w * T) + B * std::cos(w * T));
  t.boundary = ddT * dT - d1 * d0;
  return t;
}

}  // namespace degenwave
