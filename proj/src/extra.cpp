#include "extralab/extra.hpp"

#include <cmath>
#include <iostream>

#include "extralab/csv.hpp"
#include "extralab/errors.hpp"

namespace extralab {

namespace {

void require_positive_step(double alpha, double beta) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ArgumentError("step size alpha must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ArgumentError("penalty beta must be positive");
}

void require_shapes(const ExtraState& s, const SmoothObjective& obj, const WeightMatrix& w) {
  if (w.agents() != obj.agents()) throw ArgumentError("weight matrix size does not match agent count");
  if (s.x.rows() != obj.agents() || s.x.cols() != obj.dim()) throw ArgumentError("primal iterate has wrong shape");
  if (s.v.rows() != s.x.rows() || s.v.cols() != s.x.cols()) throw ArgumentError("dual iterate has wrong shape");
}

void accumulate(ExtraState& s, const AveragingWindow& window) {
  if (!window.enabled() || s.k < window.start) return;
  if (!s.running_sum || s.window_start != window.start) {
    s.running_sum = RowMatrix::Zero(s.x.rows(), s.x.cols());
    s.window_start = window.start;
    s.window_count = 0;
  }
  *s.running_sum += s.x;
  ++s.window_count;
}

}  // namespace

ExtraConfig preset_strongly_convex(const SmoothObjective& obj, const WeightMatrix& w, long steps,
                                   StronglyConvexVariant variant) {
  (void)w;
  if (obj.strong_convexity() <= 0.0) throw ArgumentError("strongly convex preset needs mu > 0");
  const double l = obj.smoothness();
  ExtraConfig c;
  c.beta = l;
  c.alpha = variant == StronglyConvexVariant::theory ? 1.0 / (4.0 * l) : 1.0 / l;
  c.steps = steps;
  return c;
}

ExtraConfig preset_nonstrongly_convex(const SmoothObjective& obj, const WeightMatrix& w, long steps) {
  if (obj.strong_convexity() != 0.0) {
    std::cerr << "warning: nonstrongly convex preset used on an objective with mu = "
              << format_double(obj.strong_convexity()) << '\n';
  }
  if (w.sigma2() >= 1.0) throw ArgumentError("graph is disconnected (sigma2 = 1)");
  const double l = obj.smoothness();
  ExtraConfig c;
  c.beta = l / std::sqrt(1.0 - w.sigma2());
  c.alpha = 1.0 / (2.0 * (l + c.beta));
  c.steps = steps;
  c.average = AveragingWindow::from_iteration(1);
  return c;
}

ExtraConfig preset_original(const SmoothObjective& obj, long steps, OriginalVariant variant) {
  const double l = obj.smoothness();
  const double mu = obj.strong_convexity();
  ExtraConfig c;
  switch (variant) {
    case OriginalVariant::practical:
      c.alpha = 1.0 / l;
      break;
    case OriginalVariant::mu_over_l_squared:
      if (mu <= 0.0) throw ArgumentError("alpha = mu/L^2 needs mu > 0");
      c.alpha = mu / (l * l);
      break;
    case OriginalVariant::mu_squared_over_l:
      if (mu <= 0.0) throw ArgumentError("alpha = mu^2/L needs mu > 0");
      c.alpha = mu * mu / l;
      break;
  }
  c.beta = 1.0 / c.alpha;
  c.steps = steps;
  return c;
}

ExtraStepper::ExtraStepper(const SmoothObjective& obj, const WeightMatrix& w, double alpha, double beta)
    : obj_(obj), half_laplacian_(0.5 * beta * w.laplacian()), alpha_(alpha), beta_(beta) {
  require_positive_step(alpha, beta);
  if (w.agents() != obj.agents()) throw ArgumentError("weight matrix size does not match agent count");
  grad_.resize(obj.agents(), obj.dim());
  mix_.resize(obj.agents(), obj.dim());
}

void ExtraStepper::step(ExtraState& s) {
  stacked_gradient(obj_, s.x, grad_);
  mix_.noalias() = half_laplacian_ * s.x;
  s.x.noalias() -= alpha_ * (grad_ + s.v + mix_);
  mix_.noalias() = half_laplacian_ * s.x;
  s.v += mix_;
  ++s.k;

  const double norm = s.x.norm();
  if (!std::isfinite(norm) || !s.v.allFinite() || norm > divergence_limit_) {
    throw DivergenceError("iterates diverged at step " + std::to_string(s.k) + " (||X|| = " + format_double(norm) +
                              ")",
                          s.k, norm);
  }
}

ExtraState extra_step(const ExtraState& state, const SmoothObjective& obj, const WeightMatrix& w,
                      const ExtraConfig& config) {
  require_shapes(state, obj, w);
  ExtraStepper stepper(obj, w, config.alpha, config.beta);
  stepper.set_divergence_scale(state.x.norm());
  ExtraState next = state;
  stepper.step(next);
  accumulate(next, config.average);
  return next;
}

ExtraRun run_extra(const SmoothObjective& obj, const WeightMatrix& w, const ExtraConfig& config, ExtraState init,
                   IterationSink* sink, CostCounters cost) {
  require_shapes(init, obj, w);
  if (config.steps < 0) throw ArgumentError("step count must be non-negative");
  ExtraStepper stepper(obj, w, config.alpha, config.beta);
  stepper.set_divergence_scale(init.x.norm());

  ExtraRun run;
  run.state = std::move(init);
  run.cost = cost;
  const RowMatrix* output = &run.state.x;
  RowMatrix average;
  for (long t = 0; t < config.steps; ++t) {
    stepper.step(run.state);
    accumulate(run.state, config.average);
    run.cost.comm_rounds += 2;
    run.cost.grad_rounds += 1;
    ++run.steps;
    if (sink) {
      if (run.state.window_count > 0) {
        average = *run.state.running_sum / static_cast<double>(run.state.window_count);
        output = &average;
      }
      if (!sink->on_iteration({run.state.k, run.state, *output, run.cost})) {
        run.stopped_early = true;
        break;
      }
    }
  }
  if (config.average.enabled()) run.average = run.state.average();
  return run;
}

TwoStagePlan plan_two_stage(double smoothness, double eps, double sigma2, const ProblemRadii& radii) {
  if (!(eps > 0.0)) throw ArgumentError("eps must be positive");
  if (sigma2 >= 1.0) throw ArgumentError("graph is disconnected (sigma2 = 1)");
  TwoStagePlan plan;
  plan.smoothness = smoothness + eps;
  plan.delta = theorem1_delta(plan.smoothness, eps, sigma2);
  const double gap = 1.0 - sigma2;
  const double shrink = std::log(2.0 / (gap * gap));
  plan.warmup_iterations = shrink > 0.0 ? static_cast<long>(std::ceil(shrink / -std::log1p(-plan.delta))) : 0;
  const double scale = plan.smoothness * radii.r1 + radii.r2 / plan.smoothness;
  plan.averaging_iterations = std::max(1L, static_cast<long>(std::ceil(scale / eps)));
  return plan;
}

TwoStageResult run_two_stage_regularized(ObjectivePtr obj, const WeightMatrix& w, double eps,
                                         const ProblemRadii& radii, ExtraState init, IterationSink* sink) {
  TwoStageResult result;
  result.regularized = regularize(obj, eps);
  result.plan = plan_two_stage(obj->smoothness(), eps, w.sigma2(), radii);
  ExtraConfig config;
  config.beta = result.plan.smoothness;
  config.alpha = 1.0 / (4.0 * result.plan.smoothness);
  config.steps = result.plan.warmup_iterations + result.plan.averaging_iterations;
  config.average = AveragingWindow::from_iteration(result.plan.warmup_iterations + 1);
  result.run = run_extra(*result.regularized, w, config, std::move(init), sink);
  return result;
}

}  // namespace extralab
