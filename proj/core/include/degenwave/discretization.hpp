#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "degenwave/weight_model.hpp"

namespace degenwave {

using Index = Eigen::Index;
using Point = std::array<double, 3>;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// A boundary face node with a unique outward normal. Edge and corner nodes
/// of the closed grid are not enumerated: they have no interior neighbour
/// along an axis and carry no flux.
struct BoundaryNode {
  Point position{};
  Point normal{};
  int axis = 0;
  int side = 1;  // -1 for the lower face, +1 for the upper face
  Index neighbor = -1;         // interior node at distance h
  Index second_neighbor = -1;  // interior node at distance 2h
};

/// Uniform tensor grid over center + (-L, L)^N with n interior nodes per axis.
/// Interior nodes are numbered lexicographically with axis 0 fastest.
class Grid {
 public:
  Grid(int dimension, int n, double half_width, Point center = {});

  int dimension() const { return dimension_; }
  int nodes_per_axis() const { return n_; }
  double half_width() const { return half_width_; }
  double spacing() const { return h_; }
  const Point& center() const { return center_; }

  Index interior_count() const { return interior_count_; }
  /// h^N, the weight of the discrete L2 inner product.
  double volume_element() const { return volume_element_; }
  /// h^(N-1), the weight of boundary sums.
  double face_element() const { return face_element_; }

  /// Coordinate of index i along `axis`, i in [-1, n]; -1 and n lie on the boundary.
  double coordinate(int axis, int i) const;
  /// Coordinate of the midpoint between indices i and i + 1.
  double edge_midpoint(int axis, int i) const;

  std::array<int, 3> multi_index(Index flat) const;
  Index flat_index(const std::array<int, 3>& idx) const;
  Point position(Index flat) const;

  const std::vector<BoundaryNode>& boundary() const { return boundary_; }
  Index boundary_count() const { return static_cast<Index>(boundary_.size()); }

  /// Every node of the closed grid, interior and boundary, corners included.
  std::vector<Point> closed_nodes() const;

 private:
  int dimension_;
  int n_;
  double half_width_;
  double h_;
  Point center_;
  Index interior_count_;
  double volume_element_;
  double face_element_;
  std::vector<BoundaryNode> boundary_;
};

Grid build_grid(int dimension, int n, double half_width);

double norm(const Point& x, int dimension);

using WeightField = std::function<double(std::span<const double>)>;

/// Flux-form realization of -div(w grad .) with homogeneous Dirichlet data.
struct OperatorMatrix {
  Grid grid;
  std::optional<WeightParams> params;  // empty for ad hoc weight fields
  SparseMatrix matrix;
  std::vector<double> boundary_edge_weight;  // w at the midpoint of each boundary edge
  std::vector<double> boundary_node_weight;  // w at each boundary node
  double lambda_max_estimate = 0.0;          // largest Ritz value of `matrix`

  Index size() const { return matrix.rows(); }
};

OperatorMatrix assemble_operator(const Grid& grid, const WeightParams& params);
OperatorMatrix assemble_operator(const Grid& grid, const WeightField& weight);

/// Interior forcing g with g_x = sum_{boundary neighbours y} w(mid(x, y)) u(y) / h^2.
Eigen::VectorXd boundary_lift(const OperatorMatrix& op, const Eigen::VectorXd& trace);

/// Second-order one-sided outward derivative (-4 phi_1 + phi_2) / (2h) at
/// every boundary node, optionally multiplied by w at the node.
Eigen::VectorXd normal_flux(const OperatorMatrix& op, const Eigen::VectorXd& phi, bool weighted);

/// First-order conormal flux w(mid) (0 - phi_1) / h. This is exactly
/// -boundary_lift^* for the h^N interior and h^(N-1) boundary products.
Eigen::VectorXd conormal_flux(const OperatorMatrix& op, const Eigen::VectorXd& phi);

struct DiscreteNorms {
  double l2 = 0.0;
  double h1w = 0.0;
};

DiscreteNorms discrete_norms(const OperatorMatrix& op, const Eigen::VectorXd& phi);

double l2_inner(const Grid& grid, const Eigen::VectorXd& a, const Eigen::VectorXd& b);
/// phi^T A psi h^N, the discrete form of int w grad phi . grad psi.
double energy_form(const OperatorMatrix& op, const Eigen::VectorXd& phi, const Eigen::VectorXd& psi);

/// Lower bound (N - 2 + alpha)^2 / (4 M^(2 - alpha)) on the first eigenvalue.
double first_eigenvalue_lower_bound(double alpha, int dimension, double M);

/// Writes "row col value" lines (1-based indices) after a header comment.
void export_coordinate(const OperatorMatrix& op, std::ostream& out);

/// Largest eigenvalue estimate from a short Lanczos run.
double estimate_lambda_max(const SparseMatrix& matrix, int steps = 60);

}  // namespace degenwave
