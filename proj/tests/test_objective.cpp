#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "extralab/errors.hpp"
#include "extralab/graph.hpp"
#include "extralab/objective.hpp"

using namespace extralab;

namespace {

Eigen::VectorXd random_vector(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

// Central finite differences on local_value.
Eigen::VectorXd fd_gradient(const SmoothObjective& obj, int agent, const Eigen::VectorXd& x) {
  const double h = 1e-6;
  Eigen::VectorXd g(x.size());
  for (int k = 0; k < x.size(); ++k) {
    Eigen::VectorXd xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    g(k) = (obj.local_value(agent, xp) - obj.local_value(agent, xm)) / (2 * h);
  }
  return g;
}

// Power iteration on A_i A_i' for the top eigenvalue.
double power_iteration(const Eigen::MatrixXd& a) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(a.rows());
  double lambda = 0.0;
  for (int it = 0; it < 5000; ++it) {
    Eigen::VectorXd w = a * (a.transpose() * v);
    lambda = w.norm() / v.norm();
    v = w / w.norm();
  }
  return lambda;
}

}  // namespace

TEST(LeastSquares, GeneratorShapesAndNormalizedColumns) {
  const auto inst = gen_least_squares_instance(7, 3, 4, 0.1, 9);
  ASSERT_EQ(inst.a.size(), 4u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(inst.a[i].rows(), 7);
    EXPECT_EQ(inst.a[i].cols(), 3);
    EXPECT_GE(inst.a[i].minCoeff(), 0.0);
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(inst.a[i].col(c).norm(), 1.0, 1e-14);
    EXPECT_LT((inst.b[i] - inst.a[i].transpose() * inst.x_bar).norm(), 1e-14);
  }
}

TEST(LeastSquares, Deterministic) {
  const auto a = gen_least_squares_instance(5, 3, 3, 0.0, 4);
  const auto b = gen_least_squares_instance(5, 3, 3, 0.0, 4);
  EXPECT_EQ(a.x_bar, b.x_bar);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(a.a[i], b.a[i]);
  EXPECT_NE(gen_least_squares_instance(5, 3, 3, 0.0, 5).x_bar, a.x_bar);
}

TEST(LeastSquares, RejectsBadSizes) {
  EXPECT_THROW(gen_least_squares_instance(0, 3, 3, 0.0, 1), ArgumentError);
  EXPECT_THROW(gen_least_squares_instance(3, 3, 3, -1.0, 1), ArgumentError);
}

TEST(LeastSquares, GradientMatchesFiniteDifferences) {
  const auto obj = gen_least_squares(6, 4, 3, 0.05, 2);
  for (int i = 0; i < 3; ++i) {
    const Eigen::VectorXd x = random_vector(6, 10 + i);
    EXPECT_LT((obj->local_gradient(i, x) - fd_gradient(*obj, i, x)).norm(), 1e-6);
  }
}

TEST(LeastSquares, SmoothnessMatchesPowerIteration) {
  const double mu = 0.01;
  const auto obj = gen_least_squares(8, 3, 5, mu, 3);
  double top = 0.0;
  for (const auto& a : obj->instance().a) top = std::max(top, power_iteration(a));
  EXPECT_NEAR(obj->smoothness(), top + mu, 1e-9);
  EXPECT_EQ(obj->strong_convexity(), mu);
}

TEST(LeastSquares, GradientIsLipschitz) {
  const auto obj = gen_least_squares(6, 4, 3, 0.0, 5);
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXd x = random_vector(6, 100 + t), y = random_vector(6, 200 + t);
    for (int i = 0; i < 3; ++i) {
      const double lhs = (obj->local_gradient(i, x) - obj->local_gradient(i, y)).norm();
      EXPECT_LE(lhs, obj->smoothness() * (x - y).norm() * (1 + 1e-12));
    }
  }
}

TEST(LeastSquares, PlantedSolutionIsExactWithoutRidge) {
  const auto obj = gen_least_squares(4, 3, 5, 0.0, 6);
  const ConsensusOperators ops = matrix_sqrt_half(metropolis_lazy_weights(gen_ring(5)));
  const ReferenceSolution ref = solve_reference(*obj, ops);
  EXPECT_LT((ref.x_star - obj->instance().x_bar).norm(), 1e-9);
  EXPECT_NEAR(ref.f_star, 0.0, 1e-18);
  EXPECT_LT(ref.lambda_star.norm(), 1e-9);
  const ProblemRadii r = estimate_radii(ref, RowMatrix::Zero(5, 4));
  EXPECT_NEAR(r.r1, obj->instance().x_bar.squaredNorm(), 1e-9);
  EXPECT_LT(r.r2, 1e-18);
}

TEST(LeastSquares, SaveLoadRoundTrip) {
  const auto inst = gen_least_squares_instance(5, 2, 3, 0.25, 8);
  const auto dir = std::filesystem::temp_directory_path() / "extralab_instance_roundtrip";
  std::filesystem::remove_all(dir);
  save_instance(dir, inst);
  const auto back = load_instance(dir);
  EXPECT_EQ(back.dim, 5);
  EXPECT_EQ(back.samples, 2);
  EXPECT_EQ(back.agents, 3);
  EXPECT_EQ(back.mu, 0.25);
  EXPECT_EQ(back.seed, 8u);
  EXPECT_EQ(back.x_bar, inst.x_bar);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(back.a[i], inst.a[i]);
    EXPECT_EQ(back.b[i], inst.b[i]);
  }
  std::filesystem::remove_all(dir);
}

TEST(Regularized, AddsRidgeTerm) {
  const auto base = gen_least_squares(5, 3, 3, 0.0, 1);
  const auto reg = regularize(base, 0.5);
  EXPECT_NEAR(reg->smoothness(), base->smoothness() + 0.5, 1e-15);
  EXPECT_NEAR(reg->strong_convexity(), 0.5, 1e-15);
  const Eigen::VectorXd x = random_vector(5, 3);
  EXPECT_NEAR(reg->local_value(1, x), base->local_value(1, x) + 0.25 * x.squaredNorm(), 1e-12);
  EXPECT_LT((reg->local_gradient(1, x) - fd_gradient(*reg, 1, x)).norm(), 1e-6);
  EXPECT_THROW(regularize(base, 0.0), ArgumentError);
}

TEST(Regularized, ObjectiveTransferInequality) {
  // F(x) - F* <= F_eps(x) - F_eps* + (eps/2)||x*||^2.
  const double eps = 1e-2;
  const auto base = gen_least_squares(6, 2, 4, 0.0, 2);
  const auto reg = regularize(base, eps);
  const ConsensusOperators ops = matrix_sqrt_half(metropolis_lazy_weights(gen_ring(4)));
  const auto ref = solve_reference(*base, ops);
  const auto ref_eps = solve_reference(*reg, ops);
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXd x = ref_eps.x_star + 0.1 * random_vector(6, 50 + t);
    const double lhs = global_value(*base, x) - ref.f_star;
    const double rhs = global_value(*reg, x) - ref_eps.f_star + 0.5 * eps * ref.x_star.squaredNorm();
    EXPECT_LE(lhs, rhs + 1e-12);
  }
}

TEST(Shifted, ProximalTermAndModel) {
  const auto base = gen_least_squares(4, 2, 3, 0.1, 3);
  RowMatrix anchors(3, 4);
  for (int i = 0; i < 3; ++i) anchors.row(i) = random_vector(4, 20 + i).transpose();
  const auto g = shift_proximal(base, 2.0, anchors);
  EXPECT_NEAR(g->smoothness(), base->smoothness() + 2.0, 1e-15);
  EXPECT_NEAR(g->strong_convexity(), 0.1 + 2.0, 1e-15);
  const Eigen::VectorXd x = random_vector(4, 7);
  for (int i = 0; i < 3; ++i) {
    const Eigen::VectorXd y = anchors.row(i).transpose();
    EXPECT_NEAR(g->local_value(i, x), base->local_value(i, x) + (x - y).squaredNorm(), 1e-12);
    EXPECT_LT((g->local_gradient(i, x) - fd_gradient(*g, i, x)).norm(), 1e-6);
  }
  const auto q = g->quadratic_model();
  ASSERT_TRUE(q.has_value());
  for (int i = 0; i < 3; ++i) {
    const double model = 0.5 * x.dot(q->hessians[i] * x) - q->linear[i].dot(x) + q->offsets[i];
    EXPECT_NEAR(model, g->local_value(i, x), 1e-10);
  }
  EXPECT_THROW(shift_proximal(base, 0.0, anchors), ArgumentError);
  EXPECT_THROW(shift_proximal(base, 1.0, RowMatrix::Zero(2, 4)), ArgumentError);
}

TEST(Reference, KktAndDualBound) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto obj = gen_least_squares(5, 3, 8, 0.01, seed);
    const WeightMatrix w = metropolis_lazy_weights(gen_erdos_renyi(8, 0.4, seed));
    const ConsensusOperators ops = matrix_sqrt_half(w);
    const auto ref = solve_reference(*obj, ops);
    EXPECT_LT(global_gradient(*obj, ref.x_star).norm(), 1e-10);
    EXPECT_LT((ops.u_sqrt * ref.lambda_star + ref.grad_at_star).norm(), 1e-10);
    // lambda* in Span(U): its columns sum to zero.
    EXPECT_LT(ref.lambda_star.colwise().sum().norm(), 1e-10);
    const double bound = std::sqrt(2.0) * ref.grad_at_star.norm() / std::sqrt(1.0 - w.sigma2());
    EXPECT_LE(ref.lambda_star.norm(), bound * (1 + 1e-12));
  }
}

// An objective without a quadratic model exercises the gradient-descent path.
class OpaqueQuadratic final : public SmoothObjective {
 public:
  explicit OpaqueQuadratic(ObjectivePtr inner)
      : SmoothObjective(inner->agents(), inner->dim(), inner->smoothness(), inner->strong_convexity()),
        inner_(std::move(inner)) {}
  double local_value(int i, const Eigen::Ref<const Eigen::VectorXd>& x) const override {
    return inner_->local_value(i, x);
  }
  void local_gradient(int i, const Eigen::Ref<const Eigen::VectorXd>& x,
                      Eigen::Ref<Eigen::VectorXd> out) const override {
    inner_->local_gradient(i, x, out);
  }

 private:
  ObjectivePtr inner_;
};

TEST(Reference, IterativeFallbackAgreesWithDirectSolve) {
  const auto obj = gen_least_squares(4, 3, 4, 0.2, 11);
  const ConsensusOperators ops = matrix_sqrt_half(metropolis_lazy_weights(gen_ring(4)));
  const auto direct = solve_reference(*obj, ops);
  const auto iterative = solve_reference(OpaqueQuadratic(obj), ops);
  EXPECT_LT((direct.x_star - iterative.x_star).norm(), 1e-10);
}

TEST(Reference, FallbackBudgetExhaustion) {
  const auto obj = gen_least_squares(4, 3, 4, 0.0, 12);
  const ConsensusOperators ops = matrix_sqrt_half(metropolis_lazy_weights(gen_ring(4)));
  ReferenceOptions opts;
  opts.max_iterations = 3;
  EXPECT_THROW(solve_reference(OpaqueQuadratic(obj), ops, opts), ReferenceSolveError);
}

TEST(Objective, StackedGradientShapeCheck) {
  const auto obj = gen_least_squares(4, 2, 3, 0.0, 1);
  EXPECT_THROW(stacked_gradient(*obj, RowMatrix::Zero(2, 4)), ArgumentError);
  EXPECT_THROW(obj->local_value(3, Eigen::VectorXd::Zero(4)), ArgumentError);
}
