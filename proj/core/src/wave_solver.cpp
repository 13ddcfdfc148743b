#include "degenwave/wave_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "degenwave/error.hpp"

namespace degenwave {

Eigen::VectorXd Forcing::at(Index k, Index size) const {
  switch (kind_) {
    case Kind::Zero: return Eigen::VectorXd::Zero(size);
    case Kind::Constant: return constant_;
    case Kind::Sampled: return samples_.col(k);
  }
  return Eigen::VectorXd::Zero(size);
}

void Forcing::check(Index size, Index samples) const {
  if (kind_ == Kind::Constant && constant_.size() != size) {
    throw ConfigError("forcing vector has the wrong length");
  }
  if (kind_ == Kind::Sampled && (samples_.rows() != size || samples_.cols() != samples)) {
    throw ConfigError("sampled forcing must be " + std::to_string(size) + " x " + std::to_string(samples) +
                      ", got " + std::to_string(samples_.rows()) + " x " + std::to_string(samples_.cols()));
  }
}

namespace {

void check_state(const OperatorMatrix& op, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != op.size() || b.size() != op.size()) {
    throw ConfigError("initial data must have one entry per interior node");
  }
}

// Allocates the per-sample buffers of a record with `samples` time points.
SolutionRecord make_record(const OperatorMatrix& op, double T, Index steps, bool store) {
  SolutionRecord rec;
  const Index samples = steps + 1;
  rec.dt = T / static_cast<double>(steps);
  rec.volume_element = op.grid.volume_element();
  rec.times.resize(static_cast<std::size_t>(samples));
  for (Index k = 0; k < samples; ++k) rec.times[static_cast<std::size_t>(k)] = k == steps ? T : k * rec.dt;
  rec.energy.times = rec.times;
  rec.energy.kinetic.assign(static_cast<std::size_t>(samples), 0.0);
  rec.energy.potential.assign(static_cast<std::size_t>(samples), 0.0);
  rec.energy.total.assign(static_cast<std::size_t>(samples), 0.0);
  const Index nb = op.grid.boundary_count();
  rec.flux.times = rec.times;
  rec.flux.flux.resize(nb, samples);
  rec.flux.weighted_flux.resize(nb, samples);
  rec.flux.conormal.resize(nb, samples);
  if (store) {
    rec.displacement.resize(op.size(), samples);
    rec.velocity.resize(op.size(), samples);
  }
  return rec;
}

// Fills energy, flux and (optionally) state columns for sample k; `Ay` is A * y.
void record_sample(const OperatorMatrix& op, SolutionRecord& rec, Index k, const Eigen::VectorXd& y,
                   const Eigen::VectorXd& Ay, const Eigen::VectorXd& v, bool store) {
  const double vol = op.grid.volume_element();
  const auto ks = static_cast<std::size_t>(k);
  rec.energy.kinetic[ks] = 0.5 * v.squaredNorm() * vol;
  rec.energy.potential[ks] = 0.5 * y.dot(Ay) * vol;
  rec.energy.total[ks] = rec.energy.kinetic[ks] + rec.energy.potential[ks];
  rec.flux.flux.col(k) = normal_flux(op, y, false);
  rec.flux.weighted_flux.col(k) = normal_flux(op, y, true);
  rec.flux.conormal.col(k) = conormal_flux(op, y);
  if (store) {
    rec.displacement.col(k) = y;
    rec.velocity.col(k) = v;
  }
  const Index last = static_cast<Index>(rec.times.size()) - 1;
  if (k == 0) rec.initial = {rec.times.front(), y, v};
  if (k == last) rec.final = {rec.times.back(), y, v};
}

// Central differences in the direction of integration. `rhs(k)` is the
// forcing at time sample k. With direction Backward the recursion starts at
// sample `steps` and runs in reversed time (velocity sign flipped).
template <class Rhs>
SolutionRecord run_leapfrog(const OperatorMatrix& op, const Eigen::VectorXd& y_start, const Eigen::VectorXd& v_start,
                            Direction direction, double T, Index steps, Rhs&& rhs, bool store) {
  SolutionRecord rec = make_record(op, T, steps, store);
  const double dt = rec.dt;
  const double dt2 = dt * dt;
  const double s = direction == Direction::Forward ? 1.0 : -1.0;
  auto sample = [&](Index j) { return direction == Direction::Forward ? j : steps - j; };

  Eigen::VectorXd prev = y_start;
  Eigen::VectorXd A_prev = op.matrix * prev;
  Eigen::VectorXd curr = prev + dt * s * v_start + 0.5 * dt2 * (rhs(sample(0)) - A_prev);
  record_sample(op, rec, sample(0), prev, A_prev, v_start, store);

  Eigen::VectorXd next(op.size());
  for (Index j = 1; j <= steps; ++j) {
    const Eigen::VectorXd A_curr = op.matrix * curr;
    next = 2.0 * curr - prev + dt2 * (rhs(sample(j)) - A_curr);
    const Eigen::VectorXd v = s * (next - prev) / (2.0 * dt);
    record_sample(op, rec, sample(j), curr, A_curr, v, store);
    prev.swap(curr);
    curr.swap(next);
  }
  return rec;
}

void check_cfl(const OperatorMatrix& op, double dt) {
  const double limit = cfl_limit(op);
  if (dt > limit * (1.0 + 1e-12)) {
    throw ConfigError("leapfrog step " + std::to_string(dt) + " violates the CFL limit " + std::to_string(limit) +
                      " (lambda_max estimate " + std::to_string(op.lambda_max_estimate) + ")");
  }
}

}  // namespace

double cfl_limit(const OperatorMatrix& op) { return 0.9 * 2.0 / std::sqrt(op.lambda_max_estimate); }

int step_count(double T, double dt) {
  if (!(T > 0.0)) throw ConfigError("time horizon T must be positive");
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  return std::max(1, static_cast<int>(std::ceil(T / dt - 1e-9)));
}

SolutionRecord solve_spectral(const OperatorMatrix& op, const EigenBasis& basis, const Eigen::VectorXd& phi0,
                              const Eigen::VectorXd& phi1, const Forcing& f, double T, int steps,
                              const SolveOptions& options) {
  if (!(T > 0.0)) throw ConfigError("solve_spectral: T must be positive");
  if (steps < 2) throw ConfigError("solve_spectral: need at least 2 time steps");
  if (basis.size() == 0) throw ConfigError("solve_spectral: empty eigenbasis");
  if ((basis.eigenvalues.array() <= 0.0).any()) throw ConfigError("solve_spectral: basis has nonpositive eigenvalues");
  if (basis.interior_count() != op.size()) throw ConfigError("solve_spectral: basis does not match operator");
  check_state(op, phi0, phi1);
  f.check(op.size(), steps + 1);

  const Index m = basis.size();
  const Index samples = steps + 1;
  SolutionRecord rec = make_record(op, T, steps, options.store_states);

  const Eigen::VectorXd a = project(basis, phi0);
  const Eigen::VectorXd b = project(basis, phi1);
  Eigen::VectorXd c;
  Eigen::MatrixXd F;
  if (f.kind() == Forcing::Kind::Constant) c = project(basis, f.constant_value());
  if (f.kind() == Forcing::Kind::Sampled) F = basis.eigenvectors.transpose() * f.samples() * basis.volume_element;

  ModeTrajectories modes{basis.eigenvalues, Eigen::MatrixXd(m, samples), Eigen::MatrixXd(m, samples)};
  for (Index n = 0; n < m; ++n) {
    const double lambda = basis.eigenvalues[n];
    const double w = std::sqrt(lambda);
    double C = 0.0, S = 0.0;  // running trapezoid sums of f_n cos(ws), f_n sin(ws)
    double prev_fc = 0.0, prev_fs = 0.0;
    for (Index k = 0; k < samples; ++k) {
      const double t = rec.times[static_cast<std::size_t>(k)];
      const double cs = std::cos(w * t), sn = std::sin(w * t);
      double d = a[n] * cs + b[n] * sn / w;
      double dd = -a[n] * w * sn + b[n] * cs;
      if (f.kind() == Forcing::Kind::Constant) {
        d += c[n] * (1.0 - cs) / lambda;
        dd += c[n] * sn / w;
      } else if (f.kind() == Forcing::Kind::Sampled) {
        const double fc = F(n, k) * cs, fs = F(n, k) * sn;
        if (k > 0) {
          C += 0.5 * rec.dt * (prev_fc + fc);
          S += 0.5 * rec.dt * (prev_fs + fs);
        }
        prev_fc = fc;
        prev_fs = fs;
        d += (sn * C - cs * S) / w;
        dd += cs * C + sn * S;
      }
      modes.coefficient(n, k) = d;
      modes.derivative(n, k) = dd;
    }
  }

  // Synthesize in chunks to bound memory when states are not stored.
  constexpr Index chunk = 128;
  for (Index k0 = 0; k0 < samples; k0 += chunk) {
    const Index len = std::min(chunk, samples - k0);
    const Eigen::MatrixXd Y = basis.eigenvectors * modes.coefficient.middleCols(k0, len);
    const Eigen::MatrixXd V = basis.eigenvectors * modes.derivative.middleCols(k0, len);
    const Eigen::MatrixXd AY = op.matrix * Y;
    for (Index j = 0; j < len; ++j) {
      record_sample(op, rec, k0 + j, Y.col(j), AY.col(j), V.col(j), options.store_states);
    }
  }
  rec.modes = std::move(modes);
  return rec;
}

SolutionRecord solve_leapfrog(const OperatorMatrix& op, const Eigen::VectorXd& phi0, const Eigen::VectorXd& phi1,
                              const Forcing& f, double T, double dt, const SolveOptions& options) {
  check_state(op, phi0, phi1);
  const int steps = step_count(T, dt);
  check_cfl(op, T / steps);
  f.check(op.size(), steps + 1);
  const Index n = op.size();
  return run_leapfrog(op, phi0, phi1, Direction::Forward, T, steps, [&](Index k) { return f.at(k, n); },
                      options.store_states);
}

SolutionRecord solve_controlled(const OperatorMatrix& op, const Eigen::MatrixXd& control,
                                const Eigen::VectorXd& displacement, const Eigen::VectorXd& velocity,
                                Direction direction, double T, double dt, const std::vector<Index>& support,
                                const SolveOptions& options) {
  check_state(op, displacement, velocity);
  const int steps = step_count(T, dt);
  check_cfl(op, T / steps);
  if (control.rows() != op.grid.boundary_count() || control.cols() != steps + 1) {
    throw ConfigError("control must be " + std::to_string(op.grid.boundary_count()) + " x " +
                      std::to_string(steps + 1) + " (boundary nodes x time samples), got " +
                      std::to_string(control.rows()) + " x " + std::to_string(control.cols()));
  }
  if (!support.empty()) {
    std::vector<bool> inside(static_cast<std::size_t>(control.rows()), false);
    for (Index b : support) inside[static_cast<std::size_t>(b)] = true;
    for (Index b = 0; b < control.rows(); ++b) {
      if (!inside[static_cast<std::size_t>(b)] && control.row(b).cwiseAbs().maxCoeff() != 0.0) {
        throw ConfigError("control is nonzero outside the controlled boundary portion");
      }
    }
  }
  return run_leapfrog(op, displacement, velocity, direction, T, steps,
                      [&](Index k) { return boundary_lift(op, control.col(k)); }, options.store_states);
}

double weak_residual(const OperatorMatrix& op, const SolutionRecord& record, const SeparableTest& test,
                     const Forcing& f) {
  if (record.displacement.cols() == 0) throw ConfigError("weak_residual needs a record with stored states");
  if (test.v.size() != op.size()) throw ConfigError("weak_residual: spatial test vector has the wrong length");
  const double T = record.times.back();
  double s_scale = 0.0;
  for (double t : record.times) s_scale = std::max(s_scale, std::abs(test.s(t)));
  s_scale = std::max({s_scale, std::abs(test.ds(0.0)) * T, 1e-300});
  if (std::abs(test.s(T)) > 1e-12 * s_scale || std::abs(test.ds(T)) * T > 1e-12 * s_scale) {
    throw ConfigError("weak_residual: test function must satisfy s(T) = s'(T) = 0");
  }
  const Index samples = static_cast<Index>(record.times.size());
  f.check(op.size(), samples);

  const double vol = op.grid.volume_element();
  const Eigen::VectorXd Av = op.matrix * test.v;
  const Eigen::VectorXd pv = record.displacement.transpose() * test.v * vol;
  const Eigen::VectorXd pAv = record.displacement.transpose() * Av * vol;

  double lhs = 0.0, rhs = 0.0;
  for (Index k = 0; k < samples; ++k) {
    const double t = record.times[static_cast<std::size_t>(k)];
    const double w = (k == 0 || k == samples - 1) ? 0.5 * record.dt : record.dt;
    lhs += w * (test.dds(t) * pv[k] + test.s(t) * pAv[k]);
    if (f.kind() != Forcing::Kind::Zero) rhs += w * test.s(t) * f.at(k, op.size()).dot(test.v) * vol;
  }
  rhs += test.s(0.0) * record.initial.velocity.dot(test.v) * vol;
  rhs -= test.ds(0.0) * record.initial.displacement.dot(test.v) * vol;
  return std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + 1e-300);
}

}  // namespace degenwave
