#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "extralab/graph.hpp"

namespace extralab {

/// Per-agent quadratic data: f_i(x) = 0.5 x'H_i x - c_i'x + offset_i.
struct QuadraticModel {
  std::vector<Eigen::MatrixXd> hessians;
  std::vector<Eigen::VectorXd> linear;
  std::vector<double> offsets;
};

/// A family of m local objectives f_i on R^n, each L-smooth and
/// mu-strongly convex. F(x) = (1/m) sum_i f_i(x).
///
/// Implementations must be immutable and reentrant: gradients may be
/// evaluated concurrently from several runs sharing one instance.
class SmoothObjective {
 public:
  SmoothObjective(int agents, int dim, double smoothness, double strong_convexity);
  virtual ~SmoothObjective() = default;

  int agents() const { return agents_; }
  int dim() const { return dim_; }
  double smoothness() const { return smoothness_; }
  double strong_convexity() const { return strong_convexity_; }

  virtual double local_value(int agent, const Eigen::Ref<const Eigen::VectorXd>& x) const = 0;
  virtual void local_gradient(int agent, const Eigen::Ref<const Eigen::VectorXd>& x,
                              Eigen::Ref<Eigen::VectorXd> out) const = 0;

  /// Exact quadratic data when the objective is quadratic; enables direct
  /// reference solves.
  virtual std::optional<QuadraticModel> quadratic_model() const { return std::nullopt; }

  Eigen::VectorXd local_gradient(int agent, const Eigen::VectorXd& x) const;

 protected:
  void check_agent(int agent) const;

 private:
  int agents_;
  int dim_;
  double smoothness_;
  double strong_convexity_;
};

using ObjectivePtr = std::shared_ptr<const SmoothObjective>;

/// Row i of `out` is grad f_i(row i of x).
void stacked_gradient(const SmoothObjective& obj, const RowMatrix& x, RowMatrix& out);
RowMatrix stacked_gradient(const SmoothObjective& obj, const RowMatrix& x);

/// F(x) = (1/m) sum_i f_i(x).
double global_value(const SmoothObjective& obj, const Eigen::VectorXd& x);
Eigen::VectorXd global_gradient(const SmoothObjective& obj, const Eigen::VectorXd& x);

struct LeastSquaresInstance {
  int dim = 0;
  int samples = 0;
  int agents = 0;
  double mu = 0.0;
  std::uint64_t seed = 0;
  std::vector<Eigen::MatrixXd> a;  // n x s, unit-norm columns
  std::vector<Eigen::VectorXd> b;  // b_i = A_i' x_bar
  Eigen::VectorXd x_bar;
};

/// f_i(x) = 0.5 ||A_i' x - b_i||^2 + (mu/2) ||x||^2.
class LeastSquaresObjective final : public SmoothObjective {
 public:
  explicit LeastSquaresObjective(LeastSquaresInstance instance);

  const LeastSquaresInstance& instance() const { return instance_; }

  double local_value(int agent, const Eigen::Ref<const Eigen::VectorXd>& x) const override;
  void local_gradient(int agent, const Eigen::Ref<const Eigen::VectorXd>& x,
                      Eigen::Ref<Eigen::VectorXd> out) const override;
  using SmoothObjective::local_gradient;
  std::optional<QuadraticModel> quadratic_model() const override;

  /// max_i lambda_max(A_i A_i') + mu.
  static double smoothness_of(const LeastSquaresInstance& instance);

 private:
  LeastSquaresInstance instance_;
};

/// Random instance: A_i entries iid U[0,1] with columns normalized, x_bar
/// standard normal, b_i = A_i' x_bar.
LeastSquaresInstance gen_least_squares_instance(int dim, int samples, int agents, double mu, std::uint64_t seed);
std::shared_ptr<const LeastSquaresObjective> gen_least_squares(int dim, int samples, int agents, double mu,
                                                               std::uint64_t seed);

/// Directory layout: A_<i>.csv (n x s), b_<i>.csv (s x 1), x_bar.csv and
/// meta.txt with key=value lines n, s, m, mu, seed. Agents are 0-indexed.
void save_instance(const std::filesystem::path& dir, const LeastSquaresInstance& instance);
LeastSquaresInstance load_instance(const std::filesystem::path& dir);

/// F_eps = F + (eps/2) ||x||^2, applied to every f_i.
class RegularizedObjective final : public SmoothObjective {
 public:
  RegularizedObjective(ObjectivePtr base, double eps);

  double eps() const { return eps_; }
  const SmoothObjective& base() const { return *base_; }

  double local_value(int agent, const Eigen::Ref<const Eigen::VectorXd>& x) const override;
  void local_gradient(int agent, const Eigen::Ref<const Eigen::VectorXd>& x,
                      Eigen::Ref<Eigen::VectorXd> out) const override;
  using SmoothObjective::local_gradient;
  std::optional<QuadraticModel> quadratic_model() const override;

 private:
  ObjectivePtr base_;
  double eps_;
};

/// g_i(x) = f_i(x) + (tau/2) ||x - y_i||^2 with one anchor row per agent.
class ShiftedObjective final : public SmoothObjective {
 public:
  ShiftedObjective(ObjectivePtr base, double tau, RowMatrix anchors);

  double tau() const { return tau_; }
  const RowMatrix& anchors() const { return anchors_; }
  const SmoothObjective& base() const { return *base_; }

  double local_value(int agent, const Eigen::Ref<const Eigen::VectorXd>& x) const override;
  void local_gradient(int agent, const Eigen::Ref<const Eigen::VectorXd>& x,
                      Eigen::Ref<Eigen::VectorXd> out) const override;
  using SmoothObjective::local_gradient;
  std::optional<QuadraticModel> quadratic_model() const override;

 private:
  ObjectivePtr base_;
  double tau_;
  RowMatrix anchors_;
};

ObjectivePtr regularize(ObjectivePtr obj, double eps);
ObjectivePtr shift_proximal(ObjectivePtr obj, double tau, const RowMatrix& anchors);

/// Minimizer of F and a dual certificate for the consensus-constrained
/// formulation: U lambda* = -grad f(1 x*'), lambda* in Span(U).
struct ReferenceSolution {
  Eigen::VectorXd x_star;
  double f_star = 0.0;
  RowMatrix grad_at_star;
  RowMatrix lambda_star;

  /// 1 x*' (m x n).
  RowMatrix stacked_x_star() const;
};

struct ReferenceOptions {
  long max_iterations = 2'000'000;
  double gradient_tolerance = 1e-12;
};

/// Direct (minimum-norm) solve for quadratic objectives, gradient descent
/// otherwise. Throws ReferenceSolveError when the result fails the
/// stationarity or KKT residual checks.
ReferenceSolution solve_reference(const SmoothObjective& obj, const ConsensusOperators& ops,
                                  const ReferenceOptions& options = {});

/// R1 = max(max_i ||x0_i - x*||^2, ||x*||^2), R2 = max_i ||grad f_i(x*)||^2.
struct ProblemRadii {
  double r1 = 0.0;
  double r2 = 0.0;
};
ProblemRadii estimate_radii(const ReferenceSolution& ref, const RowMatrix& x0);

}  // namespace extralab
