#include "degenwave/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "degenwave/error.hpp"

namespace degenwave {

Grid::Grid(int dimension, int n, double half_width, Point center)
    : dimension_(dimension), n_(n), half_width_(half_width), center_(center) {
  if (dimension != 2 && dimension != 3) {
    throw ConfigError("build_grid: dimension must be 2 or 3, got " + std::to_string(dimension));
  }
  if (n < 3) throw ConfigError("build_grid: need at least 3 interior nodes per axis, got " + std::to_string(n));
  if (!(half_width > 0.0)) throw ConfigError("build_grid: half_width must be positive");

  h_ = 2.0 * half_width / (n + 1);
  interior_count_ = 1;
  for (int d = 0; d < dimension; ++d) interior_count_ *= n;
  volume_element_ = std::pow(h_, dimension);
  face_element_ = std::pow(h_, dimension - 1);

  // Faces in the order (axis 0, lower), (axis 0, upper), (axis 1, lower), ...
  // with tangential indices lexicographic, lowest axis fastest.
  const Index per_face = interior_count_ / n;
  for (int axis = 0; axis < dimension; ++axis) {
    for (int side : {-1, 1}) {
      for (Index t = 0; t < per_face; ++t) {
        std::array<int, 3> idx{0, 0, 0};
        Index rest = t;
        for (int d = 0; d < dimension; ++d) {
          if (d == axis) continue;
          idx[d] = static_cast<int>(rest % n);
          rest /= n;
        }
        BoundaryNode node;
        node.axis = axis;
        node.side = side;
        idx[axis] = side < 0 ? -1 : n;
        for (int d = 0; d < dimension; ++d) node.position[d] = coordinate(d, idx[d]);
        node.normal[axis] = side;
        idx[axis] = side < 0 ? 0 : n - 1;
        node.neighbor = flat_index(idx);
        idx[axis] = side < 0 ? 1 : n - 2;
        node.second_neighbor = flat_index(idx);
        boundary_.push_back(node);
      }
    }
  }
}

double Grid::coordinate(int axis, int i) const {
  if (i == n_) return center_[axis] + half_width_;
  if (i == -1) return center_[axis] - half_width_;
  return center_[axis] - half_width_ + (i + 1) * h_;
}

double Grid::edge_midpoint(int axis, int i) const {
  return center_[axis] - half_width_ + (i + 1.5) * h_;
}

std::array<int, 3> Grid::multi_index(Index flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int d = 0; d < dimension_; ++d) {
    idx[d] = static_cast<int>(flat % n_);
    flat /= n_;
  }
  return idx;
}

Index Grid::flat_index(const std::array<int, 3>& idx) const {
  Index flat = 0;
  for (int d = dimension_ - 1; d >= 0; --d) flat = flat * n_ + idx[d];
  return flat;
}

Point Grid::position(Index flat) const {
  const auto idx = multi_index(flat);
  Point x{};
  for (int d = 0; d < dimension_; ++d) x[d] = coordinate(d, idx[d]);
  return x;
}

std::vector<Point> Grid::closed_nodes() const {
  const int m = n_ + 2;
  Index total = 1;
  for (int d = 0; d < dimension_; ++d) total *= m;
  std::vector<Point> nodes;
  nodes.reserve(static_cast<std::size_t>(total));
  for (Index flat = 0; flat < total; ++flat) {
    Index rest = flat;
    Point x{};
    for (int d = 0; d < dimension_; ++d) {
      x[d] = coordinate(d, static_cast<int>(rest % m) - 1);
      rest /= m;
    }
    nodes.push_back(x);
  }
  return nodes;
}

Grid build_grid(int dimension, int n, double half_width) { return Grid(dimension, n, half_width); }

double norm(const Point& x, int dimension) {
  double s = 0.0;
  for (int d = 0; d < dimension; ++d) s += x[d] * x[d];
  return std::sqrt(s);
}

namespace {

OperatorMatrix assemble(const Grid& grid, const WeightField& w) {
  const int N = grid.dimension();
  const int n = grid.nodes_per_axis();
  const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
  const Index count = grid.interior_count();

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(count) * (2 * N + 1));
  Eigen::VectorXd diagonal = Eigen::VectorXd::Zero(count);

  for (Index p = 0; p < count; ++p) {
    const auto idx = grid.multi_index(p);
    Point x = grid.position(p);
    for (int d = 0; d < N; ++d) {
      const double xd = x[d];
      // Upper edge (i, i+1); the lower edge is visited from the other node,
      // except on the lower boundary.
      x[d] = grid.edge_midpoint(d, idx[d]);
      const double w_up = w(std::span<const double>(x.data(), N)) * inv_h2;
      diagonal[p] += w_up;
      if (idx[d] + 1 < n) {
        auto jdx = idx;
        jdx[d] += 1;
        const Index q = grid.flat_index(jdx);
        diagonal[q] += w_up;
        triplets.emplace_back(p, q, -w_up);
        triplets.emplace_back(q, p, -w_up);
      }
      if (idx[d] == 0) {
        x[d] = grid.edge_midpoint(d, -1);
        diagonal[p] += w(std::span<const double>(x.data(), N)) * inv_h2;
      }
      x[d] = xd;
    }
  }
  for (Index p = 0; p < count; ++p) triplets.emplace_back(p, p, diagonal[p]);

  OperatorMatrix op{grid, std::nullopt, SparseMatrix(count, count), {}, {}, 0.0};
  op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  op.matrix.makeCompressed();

  for (const BoundaryNode& node : grid.boundary()) {
    Point mid = node.position;
    mid[node.axis] = grid.edge_midpoint(node.axis, node.side < 0 ? -1 : n - 1);
    op.boundary_edge_weight.push_back(w(std::span<const double>(mid.data(), N)));
    op.boundary_node_weight.push_back(w(std::span<const double>(node.position.data(), N)));
  }
  op.lambda_max_estimate = estimate_lambda_max(op.matrix);
  return op;
}

}  // namespace

OperatorMatrix assemble_operator(const Grid& grid, const WeightParams& params) {
  params.validate();
  if (params.dimension != grid.dimension()) {
    throw ConfigError("assemble_operator: weight and grid dimensions differ");
  }
  OperatorMatrix op = assemble(grid, [&params](std::span<const double> x) { return weight(params, x); });
  op.params = params;
  return op;
}

OperatorMatrix assemble_operator(const Grid& grid, const WeightField& weight_field) {
  return assemble(grid, weight_field);
}

Eigen::VectorXd boundary_lift(const OperatorMatrix& op, const Eigen::VectorXd& trace) {
  const auto& boundary = op.grid.boundary();
  if (trace.size() != static_cast<Index>(boundary.size())) {
    throw ConfigError("boundary_lift: trace has " + std::to_string(trace.size()) + " entries, grid has " +
                      std::to_string(boundary.size()) + " boundary nodes");
  }
  const double inv_h2 = 1.0 / (op.grid.spacing() * op.grid.spacing());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(op.size());
  for (std::size_t b = 0; b < boundary.size(); ++b) {
    g[boundary[b].neighbor] += op.boundary_edge_weight[b] * trace[static_cast<Index>(b)] * inv_h2;
  }
  return g;
}

Eigen::VectorXd normal_flux(const OperatorMatrix& op, const Eigen::VectorXd& phi, bool weighted) {
  const auto& boundary = op.grid.boundary();
  const double inv_2h = 0.5 / op.grid.spacing();
  Eigen::VectorXd flux(static_cast<Index>(boundary.size()));
  for (std::size_t b = 0; b < boundary.size(); ++b) {
    const auto& node = boundary[b];
    double v = (-4.0 * phi[node.neighbor] + phi[node.second_neighbor]) * inv_2h;
    if (weighted) v *= op.boundary_node_weight[b];
    flux[static_cast<Index>(b)] = v;
  }
  return flux;
}

Eigen::VectorXd conormal_flux(const OperatorMatrix& op, const Eigen::VectorXd& phi) {
  const auto& boundary = op.grid.boundary();
  const double inv_h = 1.0 / op.grid.spacing();
  Eigen::VectorXd flux(static_cast<Index>(boundary.size()));
  for (std::size_t b = 0; b < boundary.size(); ++b) {
    flux[static_cast<Index>(b)] = -op.boundary_edge_weight[b] * phi[boundary[b].neighbor] * inv_h;
  }
  return flux;
}

double l2_inner(const Grid& grid, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.dot(b) * grid.volume_element();
}

double energy_form(const OperatorMatrix& op, const Eigen::VectorXd& phi, const Eigen::VectorXd& psi) {
  return phi.dot(op.matrix * psi) * op.grid.volume_element();
}

DiscreteNorms discrete_norms(const OperatorMatrix& op, const Eigen::VectorXd& phi) {
  return {std::sqrt(l2_inner(op.grid, phi, phi)), std::sqrt(std::max(0.0, energy_form(op, phi, phi)))};
}

double first_eigenvalue_lower_bound(double alpha, int dimension, double M) {
  const double k = dimension - 2.0 + alpha;
  return k * k / (4.0 * std::pow(M, 2.0 - alpha));
}

void export_coordinate(const OperatorMatrix& op, std::ostream& out) {
  out << "# rows=" << op.matrix.rows() << " cols=" << op.matrix.cols() << " nnz=" << op.matrix.nonZeros()
      << "\n";
  char buf[96];
  for (Index col = 0; col < op.matrix.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(op.matrix, col); it; ++it) {
      std::snprintf(buf, sizeof buf, "%lld %lld %.17g\n", static_cast<long long>(it.row() + 1),
                    static_cast<long long>(it.col() + 1), it.value());
      out << buf;
    }
  }
}

double estimate_lambda_max(const SparseMatrix& matrix, int steps) {
  const Index n = matrix.rows();
  const Index k = std::min<Index>(steps, n);
  Eigen::MatrixXd V(n, k);
  Eigen::VectorXd alpha(k), beta(k);
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = uni(rng);
  v.normalize();
  Index used = 0;
  for (Index j = 0; j < k; ++j) {
    V.col(j) = v;
    used = j + 1;
    Eigen::VectorXd w = matrix * v;
    alpha[j] = v.dot(w);
    // full reorthogonalization, twice
    for (int pass = 0; pass < 2; ++pass) w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
    beta[j] = w.norm();
    if (beta[j] < 1e-12 * std::abs(alpha[j]) || j + 1 == k) break;
    v = w / beta[j];
  }
  if (used == 1) return alpha[0];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
  tri.computeFromTridiagonal(alpha.head(used), beta.head(used - 1), Eigen::EigenvaluesOnly);
  return tri.eigenvalues().maxCoeff();
}

}  // namespace degenwave
