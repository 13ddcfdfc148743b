#include "degenwave/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "degenwave/error.hpp"

namespace degenwave {

namespace {

void fix_signs(Eigen::MatrixXd& vectors) {
  for (Index j = 0; j < vectors.cols(); ++j) {
    auto col = vectors.col(j);
    const double scale = col.cwiseAbs().maxCoeff();
    for (Index i = 0; i < col.size(); ++i) {
      if (std::abs(col[i]) > 1e-8 * scale) {
        if (col[i] < 0.0) col = -col;
        break;
      }
    }
  }
}

EigenBasis finish(const OperatorMatrix& op, Eigen::VectorXd values, Eigen::MatrixXd unit_vectors) {
  fix_signs(unit_vectors);
  EigenBasis basis;
  basis.eigenvalues = std::move(values);
  basis.residuals.resize(basis.eigenvalues.size());
  const Eigen::MatrixXd image = op.matrix * unit_vectors;
  for (Index j = 0; j < unit_vectors.cols(); ++j) {
    basis.residuals[j] = (image.col(j) - basis.eigenvalues[j] * unit_vectors.col(j)).norm();
  }
  basis.volume_element = op.grid.volume_element();
  basis.eigenvectors = unit_vectors / std::sqrt(basis.volume_element);
  basis.params = op.params;
  return basis;
}

EigenBasis dense_eigs(const OperatorMatrix& op, Index m) {
  const Eigen::MatrixXd dense = Eigen::MatrixXd(op.matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
  if (solver.info() != Eigen::Success) throw SolverError("dense eigensolver failed to converge");
  return finish(op, solver.eigenvalues().head(m), solver.eigenvectors().leftCols(m));
}

// Orthonormalizes the columns of W against V.leftCols(used) and against each
// other. Columns that collapse are replaced by random directions.
void orthonormalize_block(const Eigen::MatrixXd& V, Index used, Eigen::MatrixXd& W, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  for (Index j = 0; j < W.cols(); ++j) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      auto w = W.col(j);
      const double before = w.norm();
      for (int pass = 0; pass < 2; ++pass) {
        if (used > 0) w -= V.leftCols(used) * (V.leftCols(used).transpose() * w);
        if (j > 0) w -= W.leftCols(j) * (W.leftCols(j).transpose() * w);
      }
      const double after = w.norm();
      if (after > 1e-10 * before && after > 0.0) {
        w /= after;
        break;
      }
      for (Index i = 0; i < w.size(); ++i) w[i] = gauss(rng);
    }
  }
}

EigenBasis lanczos_eigs(const OperatorMatrix& op, Index m, const EigenOptions& options) {
  const Index n = op.size();
  const Index b = std::min<Index>(std::max(1, options.block_size), n);

  Eigen::SimplicialLLT<SparseMatrix> factor(op.matrix);
  if (factor.info() != Eigen::Success) {
    throw SolverError("block Lanczos: operator is not positive definite (Cholesky failed)");
  }

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;

  Index target = std::min(n, std::max(2 * m + 2 * b, m + 64));
  Eigen::MatrixXd V(n, target);
  Index used = 0;

  Eigen::MatrixXd block(n, b);
  for (Index j = 0; j < b; ++j)
    for (Index i = 0; i < n; ++i) block(i, j) = gauss(rng);
  orthonormalize_block(V, 0, block, rng);

  double worst = 0.0;
  while (true) {
    while (used < target) {
      const Index take = std::min(block.cols(), target - used);
      V.middleCols(used, take) = block.leftCols(take);
      const Index last_start = used;
      used += take;
      if (used >= target) break;
      // Shift-invert: the Krylov space of A^{-1} resolves the low end first.
      Eigen::MatrixXd next(n, take);
      for (Index j = 0; j < take; ++j) next.col(j) = factor.solve(V.col(last_start + j));
      orthonormalize_block(V, used, next, rng);
      block = std::move(next);
    }

    const Eigen::MatrixXd AV = op.matrix * V.leftCols(used);
    Eigen::MatrixXd H = V.leftCols(used).transpose() * AV;
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(H);
    if (ritz.info() != Eigen::Success) throw SolverError("block Lanczos: Rayleigh-Ritz step failed");

    const Eigen::VectorXd values = ritz.eigenvalues().head(m);
    const Eigen::MatrixXd Y = ritz.eigenvectors().leftCols(m);
    const Eigen::MatrixXd X = V.leftCols(used) * Y;
    const Eigen::MatrixXd R = AV * Y - X * values.asDiagonal();
    worst = 0.0;
    for (Index j = 0; j < m; ++j) worst = std::max(worst, R.col(j).norm() / std::abs(values[j]));

    if (worst <= options.tolerance || used == n) {
      if (worst > 1e-9) {
        throw SolverError("block Lanczos stalled: relative residual " + std::to_string(worst));
      }
      return finish(op, values, X);
    }
    // Not converged: enlarge the Krylov space and continue from the last block.
    const Index grow = std::max<Index>(b, m / 2);
    target = std::min(n, used + grow);
    V.conservativeResize(n, target);
    Eigen::MatrixXd next(n, b);
    for (Index j = 0; j < b; ++j) next.col(j) = factor.solve(V.col(used - b + j));
    orthonormalize_block(V, used, next, rng);
    block = std::move(next);
  }
}

}  // namespace

EigenBasis compute_eigs(const OperatorMatrix& op, Index m, const EigenOptions& options) {
  if (m < 1 || m > op.size()) {
    throw ConfigError("compute_eigs: requested " + std::to_string(m) + " eigenpairs of a " +
                      std::to_string(op.size()) + "-dimensional operator");
  }
  EigenMethod method = options.method;
  if (method == EigenMethod::Auto) {
    method = op.size() <= options.dense_limit ? EigenMethod::Dense : EigenMethod::Lanczos;
  }
  return method == EigenMethod::Dense ? dense_eigs(op, m) : lanczos_eigs(op, m, options);
}

EigenBasis truncate(const EigenBasis& basis, Index m) {
  m = std::min(m, basis.size());
  EigenBasis out;
  out.eigenvalues = basis.eigenvalues.head(m);
  out.eigenvectors = basis.eigenvectors.leftCols(m);
  out.residuals = basis.residuals.head(m);
  out.volume_element = basis.volume_element;
  out.params = basis.params;
  return out;
}

EigenBasis filter_modes(const EigenBasis& basis, double gamma, double h) {
  Index keep = 0;
  while (keep < basis.size() && std::sqrt(basis.eigenvalues[keep]) * h <= gamma) ++keep;
  return truncate(basis, keep);
}

EigenBasis compute_filtered_eigs(const OperatorMatrix& op, double gamma, const EigenOptions& options) {
  if (!(gamma > 0.0)) throw ConfigError("mode filter gamma must be positive");
  const double h = op.grid.spacing();
  Index m = std::min<Index>(32, op.size());
  while (true) {
    EigenBasis basis = compute_eigs(op, m, options);
    if (std::sqrt(basis.eigenvalues[m - 1]) * h > gamma || m == op.size()) {
      EigenBasis filtered = filter_modes(basis, gamma, h);
      if (filtered.size() == 0) throw ConfigError("mode filter removes every mode; increase gamma");
      return filtered;
    }
    m = std::min(op.size(), 2 * m);
  }
}

Eigen::VectorXd project(const EigenBasis& basis, const Eigen::VectorXd& phi) {
  if (phi.size() != basis.interior_count()) throw ConfigError("project: vector size does not match basis");
  return basis.eigenvectors.transpose() * phi * basis.volume_element;
}

Eigen::VectorXd synthesize(const EigenBasis& basis, const Eigen::VectorXd& coefficients) {
  if (coefficients.size() != basis.size()) throw ConfigError("synthesize: coefficient count does not match basis");
  return basis.eigenvectors * coefficients;
}

double gram_residual(const EigenBasis& basis) {
  const Eigen::MatrixXd G = basis.eigenvectors.transpose() * basis.eigenvectors * basis.volume_element;
  return (G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
}

double weighted_gram_residual(const OperatorMatrix& op, const EigenBasis& basis) {
  const Eigen::MatrixXd G =
      basis.eigenvectors.transpose() * (op.matrix * basis.eigenvectors) * basis.volume_element;
  const Eigen::MatrixXd expected = basis.eigenvalues.asDiagonal();
  return (G - expected).cwiseAbs().maxCoeff() / basis.eigenvalues.maxCoeff();
}

SeriesIdentityReport series_identities_check(const OperatorMatrix& op, const EigenBasis& basis,
                                             const Eigen::VectorXd& phi) {
  const Eigen::VectorXd u = project(basis, phi);
  const Eigen::VectorXd in_span = synthesize(basis, u);

  SeriesIdentityReport r;
  r.energy_direct = energy_form(op, in_span, in_span);
  r.energy_series = u.cwiseProduct(u).dot(basis.eigenvalues);
  const Eigen::VectorXd image = op.matrix * in_span;
  r.image_direct = std::sqrt(l2_inner(op.grid, image, image));
  r.image_series = std::sqrt(u.cwiseProduct(basis.eigenvalues).squaredNorm());

  auto rel = [](double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
  };
  r.energy_residual = rel(r.energy_direct, r.energy_series);
  r.image_residual = rel(r.image_direct, r.image_series);
  return r;
}

}  // namespace degenwave
