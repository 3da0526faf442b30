#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace extralab {

// Iterate matrices (one row per agent) are row-major so that each agent's
// local copy is a contiguous vector.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Undirected simple graph over agents 0..m-1.
class Graph {
 public:
  using Edge = std::pair<int, int>;

  /// Builds a graph from an edge list. Edges are normalized to (min, max),
  /// deduplicated and sorted. Self-loops and out-of-range endpoints throw.
  Graph(int agents, std::vector<Edge> edges);

  int agents() const { return agents_; }
  const std::vector<Edge>& edges() const { return edges_; }
  int degree(int i) const { return static_cast<int>(neighbors_[i].size()); }
  const std::vector<int>& neighbors(int i) const { return neighbors_[i]; }
  bool has_edge(int i, int j) const;
  bool connected() const;

 private:
  int agents_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> neighbors_;
};

inline constexpr int kDefaultRetryBudget = 1000;

Graph gen_erdos_renyi(int agents, double p, std::uint64_t seed, int retries = kDefaultRetryBudget);
Graph gen_geometric(int agents, double radius, std::uint64_t seed, int retries = kDefaultRetryBudget);
Graph gen_ring(int agents);
Graph gen_line(int agents);
Graph gen_complete(int agents);

/// Symmetric doubly stochastic mixing matrix with its spectrum cached.
///
/// Construction validates symmetry, unit row sums and that all eigenvalues
/// lie in [-1, 1]. Singular values are the sorted absolute eigenvalues.
class WeightMatrix {
 public:
  explicit WeightMatrix(Eigen::MatrixXd entries);

  int agents() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  /// I - W, precomputed for the mixing steps.
  const Eigen::MatrixXd& laplacian() const { return laplacian_; }
  /// Eigenvalues of W in ascending order.
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  double sigma1() const { return sigma1_; }
  double sigma2() const { return sigma2_; }
  double spectral_gap() const { return 1.0 - sigma2_; }

 private:
  Eigen::MatrixXd entries_;
  Eigen::MatrixXd laplacian_;
  Eigen::VectorXd eigenvalues_;
  double sigma1_ = 1.0;
  double sigma2_ = 0.0;
};

/// Lazy Metropolis weights W = (I + M) / 2.
WeightMatrix metropolis_lazy_weights(const Graph& g);

/// Second largest singular value of a symmetric matrix. For a one-agent
/// network there is no second value and 0 is returned.
double second_largest_singular_value(const Eigen::MatrixXd& w);
double second_largest_singular_value(const WeightMatrix& w);
double largest_singular_value(const Eigen::MatrixXd& w);

/// U^2 = (I - W) / 2, its square root U and the pseudo-inverse of U.
struct ConsensusOperators {
  Eigen::MatrixXd half_laplacian;
  Eigen::MatrixXd u_sqrt;
  Eigen::MatrixXd u_pinv;

  /// x -> x - 1 mean(x), row-wise consensus projection.
  static RowMatrix project_disagreement(const RowMatrix& x);
};

inline constexpr double kPsdClampTolerance = 1e-9;
inline constexpr double kPinvThreshold = 1e-10;

ConsensusOperators matrix_sqrt_half(const WeightMatrix& w);
/// Raw-matrix overload: validates symmetry and PSD-ness of (I - W) / 2.
ConsensusOperators matrix_sqrt_half(const Eigen::MatrixXd& w);

// Edge-list text format: first line "m", then "i j" per edge (0-indexed).
void write_edge_list(std::ostream& out, const Graph& g);
Graph read_edge_list(std::istream& in);
// m rows of m comma-separated values, 17 significant digits.
void write_weight_csv(std::ostream& out, const WeightMatrix& w);

}  // namespace extralab
