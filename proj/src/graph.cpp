#include "extralab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>

#include "extralab/csv.hpp"
#include "extralab/errors.hpp"

namespace extralab {

namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kRowSumTolerance = 1e-10;
constexpr double kSpectrumTolerance = 1e-10;

double symmetry_defect(const Eigen::MatrixXd& w) { return (w - w.transpose()).cwiseAbs().maxCoeff(); }

void require_symmetric(const Eigen::MatrixXd& w) {
  if (w.rows() != w.cols()) throw ValidationError("matrix is not square");
  if (w.size() > 0 && symmetry_defect(w) > kSymmetryTolerance) {
    throw ValidationError("matrix is not symmetric (defect " + format_double(symmetry_defect(w)) + ")");
  }
}

Eigen::VectorXd sorted_singular_values(const Eigen::VectorXd& eigenvalues) {
  Eigen::VectorXd sv = eigenvalues.cwiseAbs();
  std::sort(sv.data(), sv.data() + sv.size(), std::greater<>());
  return sv;
}

SamplingError sampling_failure(int agents, double param) {
  return SamplingError("could not sample connected graph (m=" + std::to_string(agents) +
                           ", param=" + format_double(param) + ")",
                       agents, param);
}

}  // namespace

Graph::Graph(int agents, std::vector<Edge> edges) : agents_(agents), neighbors_(agents > 0 ? agents : 0) {
  if (agents < 1) throw ArgumentError("graph needs at least one agent");
  for (auto& [i, j] : edges) {
    if (i == j) throw ArgumentError("self-loop at agent " + std::to_string(i));
    if (i < 0 || j < 0 || i >= agents || j >= agents) {
      throw ArgumentError("edge (" + std::to_string(i) + "," + std::to_string(j) + ") out of range");
    }
    if (i > j) std::swap(i, j);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);
  for (const auto& [i, j] : edges_) {
    neighbors_[i].push_back(j);
    neighbors_[j].push_back(i);
  }
  for (auto& n : neighbors_) std::sort(n.begin(), n.end());
}

bool Graph::has_edge(int i, int j) const {
  const auto& n = neighbors_.at(i);
  return std::binary_search(n.begin(), n.end(), j);
}

bool Graph::connected() const {
  std::vector<char> seen(agents_, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int i = frontier.front();
    frontier.pop();
    for (int j : neighbors_[i]) {
      if (!seen[j]) {
        seen[j] = 1;
        ++reached;
        frontier.push(j);
      }
    }
  }
  return reached == agents_;
}

Graph gen_erdos_renyi(int agents, double p, std::uint64_t seed, int retries) {
  if (agents < 2) throw ArgumentError("erdos_renyi needs m >= 2");
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("erdos_renyi probability must lie in [0, 1]");
  for (int attempt = 0; attempt < retries; ++attempt) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Graph::Edge> edges;
    for (int i = 0; i < agents; ++i)
      for (int j = i + 1; j < agents; ++j)
        if (unif(rng) < p) edges.emplace_back(i, j);
    Graph g(agents, std::move(edges));
    if (g.connected()) return g;
  }
  throw sampling_failure(agents, p);
}

Graph gen_geometric(int agents, double radius, std::uint64_t seed, int retries) {
  if (agents < 2) throw ArgumentError("geometric graph needs m >= 2");
  if (!(radius > 0.0 && radius <= std::sqrt(2.0) + 1e-15)) {
    throw ArgumentError("geometric radius must lie in (0, sqrt(2)]");
  }
  const double r2 = radius * radius;
  for (int attempt = 0; attempt < retries; ++attempt) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> xs(agents), ys(agents);
    for (int i = 0; i < agents; ++i) {
      xs[i] = unif(rng);
      ys[i] = unif(rng);
    }
    std::vector<Graph::Edge> edges;
    for (int i = 0; i < agents; ++i) {
      for (int j = i + 1; j < agents; ++j) {
        const double dx = xs[i] - xs[j];
        const double dy = ys[i] - ys[j];
        if (dx * dx + dy * dy <= r2) edges.emplace_back(i, j);
      }
    }
    Graph g(agents, std::move(edges));
    if (g.connected()) return g;
  }
  throw sampling_failure(agents, radius);
}

Graph gen_ring(int agents) {
  if (agents < 3) throw ArgumentError("ring needs m >= 3");
  std::vector<Graph::Edge> edges;
  for (int i = 0; i < agents; ++i) edges.emplace_back(i, (i + 1) % agents);
  return Graph(agents, std::move(edges));
}

Graph gen_line(int agents) {
  if (agents < 2) throw ArgumentError("line needs m >= 2");
  std::vector<Graph::Edge> edges;
  for (int i = 0; i + 1 < agents; ++i) edges.emplace_back(i, i + 1);
  return Graph(agents, std::move(edges));
}

Graph gen_complete(int agents) {
  std::vector<Graph::Edge> edges;
  for (int i = 0; i < agents; ++i)
    for (int j = i + 1; j < agents; ++j) edges.emplace_back(i, j);
  return Graph(agents, std::move(edges));
}

WeightMatrix::WeightMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  require_symmetric(entries_);
  const Eigen::Index m = entries_.rows();
  if (m == 0) throw ValidationError("weight matrix is empty");
  const double row_defect = (entries_.rowwise().sum().array() - 1.0).abs().maxCoeff();
  if (row_defect > kRowSumTolerance) {
    throw ValidationError("weight matrix rows do not sum to 1 (defect " + format_double(row_defect) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(entries_, Eigen::EigenvaluesOnly);
  eigenvalues_ = eig.eigenvalues();
  if (eigenvalues_.minCoeff() < -1.0 - kSpectrumTolerance || eigenvalues_.maxCoeff() > 1.0 + kSpectrumTolerance) {
    throw ValidationError("weight matrix spectrum leaves [-1, 1]");
  }
  const Eigen::VectorXd sv = sorted_singular_values(eigenvalues_);
  sigma1_ = sv(0);
  sigma2_ = m > 1 ? sv(1) : 0.0;
  laplacian_ = Eigen::MatrixXd::Identity(m, m) - entries_;
}

WeightMatrix metropolis_lazy_weights(const Graph& g) {
  const int m = g.agents();
  Eigen::MatrixXd metro = Eigen::MatrixXd::Zero(m, m);
  for (const auto& [i, j] : g.edges()) {
    const double w = 1.0 / (1.0 + std::max(g.degree(i), g.degree(j)));
    metro(i, j) = w;
    metro(j, i) = w;
  }
  for (int i = 0; i < m; ++i) {
    double off = 0.0;
    for (int j : g.neighbors(i)) off += metro(i, j);
    metro(i, i) = 1.0 - off;
  }
  return WeightMatrix(0.5 * (Eigen::MatrixXd::Identity(m, m) + metro));
}

double second_largest_singular_value(const Eigen::MatrixXd& w) {
  require_symmetric(w);
  if (w.rows() < 2) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w, Eigen::EigenvaluesOnly);
  return sorted_singular_values(eig.eigenvalues())(1);
}

double second_largest_singular_value(const WeightMatrix& w) { return w.sigma2(); }

double largest_singular_value(const Eigen::MatrixXd& w) {
  require_symmetric(w);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w, Eigen::EigenvaluesOnly);
  return sorted_singular_values(eig.eigenvalues())(0);
}

RowMatrix ConsensusOperators::project_disagreement(const RowMatrix& x) {
  const Eigen::RowVectorXd mean = x.colwise().mean();
  return x.rowwise() - mean;
}

ConsensusOperators matrix_sqrt_half(const Eigen::MatrixXd& w) {
  require_symmetric(w);
  const Eigen::Index m = w.rows();
  ConsensusOperators ops;
  ops.half_laplacian = 0.5 * (Eigen::MatrixXd::Identity(m, m) - w);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(ops.half_laplacian);
  Eigen::VectorXd s = eig.eigenvalues();
  if (m > 0 && s.minCoeff() < -kPsdClampTolerance) {
    throw ValidationError("matrix not PSD (eigenvalue " + format_double(s.minCoeff()) + ")");
  }
  // Round-off on the consensus direction would otherwise survive the square root.
  s = s.unaryExpr([](double v) { return v > kPinvThreshold ? v : 0.0; });
  const Eigen::MatrixXd& q = eig.eigenvectors();
  const Eigen::VectorXd root = s.cwiseSqrt();
  Eigen::VectorXd inv_root(m);
  for (Eigen::Index k = 0; k < m; ++k) inv_root(k) = s(k) > kPinvThreshold ? 1.0 / root(k) : 0.0;
  ops.u_sqrt = q * root.asDiagonal() * q.transpose();
  ops.u_pinv = q * inv_root.asDiagonal() * q.transpose();
  return ops;
}

ConsensusOperators matrix_sqrt_half(const WeightMatrix& w) { return matrix_sqrt_half(w.entries()); }

void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.agents() << '\n';
  for (const auto& [i, j] : g.edges()) out << i << ' ' << j << '\n';
}

Graph read_edge_list(std::istream& in) {
  std::string line;
  int agents = -1;
  std::vector<Graph::Edge> edges;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    if (agents < 0) {
      if (!(ss >> agents)) throw ValidationError("edge list line " + std::to_string(line_no) + ": expected agent count");
      continue;
    }
    int i = 0, j = 0;
    if (!(ss >> i >> j)) throw ValidationError("edge list line " + std::to_string(line_no) + ": expected 'i j'");
    edges.emplace_back(i, j);
  }
  if (agents < 0) throw ValidationError("edge list is empty");
  return Graph(agents, std::move(edges));
}

void write_weight_csv(std::ostream& out, const WeightMatrix& w) { write_matrix_csv(out, w.entries()); }

}  // namespace extralab
