#pragma once

#include <optional>

#include "extralab/graph.hpp"
#include "extralab/metrics.hpp"
#include "extralab/objective.hpp"
#include "extralab/state.hpp"

namespace extralab {

/// Iterates x^k with k >= start (1-based) are averaged; start == 0 disables.
struct AveragingWindow {
  long start = 0;

  static AveragingWindow none() { return {}; }
  static AveragingWindow from_iteration(long k) { return {k}; }
  bool enabled() const { return start > 0; }
};

struct ExtraConfig {
  double alpha = 0.0;
  double beta = 0.0;
  long steps = 0;
  AveragingWindow average;
};

enum class StronglyConvexVariant { theory, practical };
enum class OriginalVariant { practical, mu_over_l_squared, mu_squared_over_l };

/// beta = L, alpha = 1/(4L) (theory) or 1/L (practical). Needs mu > 0.
ExtraConfig preset_strongly_convex(const SmoothObjective& obj, const WeightMatrix& w, long steps,
                                   StronglyConvexVariant variant = StronglyConvexVariant::theory);

/// beta = L / sqrt(1 - sigma2), alpha = 1/(2(L + beta)), averaging x^1..x^K.
ExtraConfig preset_nonstrongly_convex(const SmoothObjective& obj, const WeightMatrix& w, long steps);

/// alpha = 1/beta with V0 = 0, which reproduces the two-term EXTRA recursion.
ExtraConfig preset_original(const SmoothObjective& obj, long steps,
                            OriginalVariant variant = OriginalVariant::practical);

/// Allocation-free EXTRA step bound to one objective and weight matrix.
class ExtraStepper {
 public:
  ExtraStepper(const SmoothObjective& obj, const WeightMatrix& w, double alpha, double beta);

  /// Scale for the divergence guard: ||X|| > 1e12 (1 + scale) aborts.
  void set_divergence_scale(double initial_norm) { divergence_limit_ = 1e12 * (1.0 + initial_norm); }

  /// One step: 2 communication rounds, 1 gradient round.
  void step(ExtraState& state);

 private:
  const SmoothObjective& obj_;
  Eigen::MatrixXd half_laplacian_;
  double alpha_;
  double beta_;
  double divergence_limit_ = 1e12;
  RowMatrix grad_;
  RowMatrix mix_;
};

/// Pure single step; validates shapes.
ExtraState extra_step(const ExtraState& state, const SmoothObjective& obj, const WeightMatrix& w,
                      const ExtraConfig& config);

struct ExtraRun {
  ExtraState state;
  std::optional<RowMatrix> average;
  CostCounters cost;
  long steps = 0;
  bool stopped_early = false;

  /// The averaged iterate when averaging was requested, the last one otherwise.
  const RowMatrix& output() const { return average ? *average : state.x; }
};

/// Runs config.steps steps from `init`, notifying `sink` after each.
ExtraRun run_extra(const SmoothObjective& obj, const WeightMatrix& w, const ExtraConfig& config, ExtraState init,
                   IterationSink* sink = nullptr, CostCounters cost = {});

struct TwoStagePlan {
  long warmup_iterations = 0;     // K0
  long averaging_iterations = 0;  // K
  double delta = 0.0;
  double smoothness = 0.0;  // L + eps
};

/// K0 drives the Lyapunov value below m(1 - sigma2)(L_eps R1 + R2/L_eps);
/// K = ceil((L_eps R1 + R2/L_eps) / eps).
TwoStagePlan plan_two_stage(double smoothness, double eps, double sigma2, const ProblemRadii& radii);

struct TwoStageResult {
  ExtraRun run;
  TwoStagePlan plan;
  ObjectivePtr regularized;
};

/// EXTRA on F + (eps/2)||x||^2 with beta = L_eps, alpha = 1/(4 L_eps),
/// averaging the last K of K0 + K steps.
TwoStageResult run_two_stage_regularized(ObjectivePtr obj, const WeightMatrix& w, double eps,
                                         const ProblemRadii& radii, ExtraState init, IterationSink* sink = nullptr);

}  // namespace extralab
