#pragma once

#include <functional>

#include "extralab/extra.hpp"
#include "extralab/graph.hpp"
#include "extralab/metrics.hpp"
#include "extralab/objective.hpp"
#include "extralab/state.hpp"

namespace extralab {

enum class ConvexityMode { strongly_convex, nonstrongly_convex };

/// Momentum weights theta_k. Strongly convex: constant sqrt(q).
/// Otherwise theta_0 = 1 and theta_{k+1}^2 = (1 - theta_{k+1}) theta_k^2.
class ThetaSequence {
 public:
  static ThetaSequence strongly_convex(double q);
  static ThetaSequence nonstrongly_convex();

  ConvexityMode mode() const { return mode_; }
  double q() const { return q_; }
  long index() const { return index_; }
  double current() const { return theta_; }
  double next() const;
  void advance();

 private:
  ThetaSequence(ConvexityMode mode, double q, double theta) : mode_(mode), q_(q), theta_(theta) {}

  ConvexityMode mode_;
  double q_;
  double theta_;
  long index_ = 0;
};

double theta_next(const ThetaSequence& seq);

/// Positive root of t^2 = (1 - t) theta^2, computed without cancellation.
double theta_root(double theta);

/// theta_k (1 - theta_k) / (theta_k^2 + theta_{k+1}).
double extrapolation_coefficient(double theta_k, double theta_next);

/// L(1 - sigma2) - mu when mu > 0, L(1 - sigma2) otherwise.
double tau_default(const SmoothObjective& obj, const WeightMatrix& w);

enum class InnerScheduleRule {
  experimental,  // ceil(ln(L/(mu(1-s2))) / (5(1-s2))) or ceil(ln((k+1)/(1-s2)) / (2(1-s2)))
  theory,        // unit-constant form of the linear-rate schedules, using L+tau and mu+tau
};

using InnerSchedule = std::function<long(long)>;

/// Inner iteration count T_k for outer step k; never below 1.
InnerSchedule tk_schedule(const SmoothObjective& obj, const WeightMatrix& w, ConvexityMode mode,
                          InnerScheduleRule rule = InnerScheduleRule::experimental, double tau = 0.0);

struct CatalystConfig {
  double tau = 0.0;
  InnerSchedule inner_iterations;
  double xi = 0.1;
  long outer_iterations = 0;
  // Inner step: 1/(4(L + tau)) for theory, 1/(L + tau) for practical.
  StronglyConvexVariant inner_variant = StronglyConvexVariant::theory;
};

/// tau_default and the experimental schedule for the objective's convexity.
CatalystConfig default_catalyst_config(const SmoothObjective& obj, const WeightMatrix& w, long outer_iterations);

struct AccState {
  ExtraState inner;  // X^k and V^k
  RowMatrix y;
  ThetaSequence theta;
  long k = 0;
};

/// Everything about one finished outer step, for diagnostics.
struct OuterStep {
  long k;
  long inner_steps;
  const SmoothObjective& subproblem;  // G^k
  const RowMatrix& x_prev;            // X^k
  const RowMatrix& x_next;            // X^{k+1}
  const RowMatrix& y_next;            // Y^{k+1}
  double coefficient;
};

using OuterObserver = std::function<void(const OuterStep&)>;

struct AccRun {
  AccState state;
  CostCounters cost;
  bool stopped_early = false;
};

/// Catalyst outer loop around warm-started EXTRA. Each outer step solves the
/// shifted subproblem with T_k + 1 inner steps (beta = L + tau and the
/// strongly convex step for L + tau) and then extrapolates Y. The sink is notified
/// once per outer step with X^{k+1} as output.
AccRun run_acc_extra(ObjectivePtr obj, const WeightMatrix& w, const CatalystConfig& config, RowMatrix x0,
                     IterationSink* sink = nullptr, const OuterObserver& observer = {});

/// Subproblem tolerance (2/9)(F(x0) - F*)(1 - rho)^{k+1} for the strongly
/// convex case, rho = factor * sqrt(q).
double catalyst_tolerance_sc(double initial_gap, double q, long k, double rho_factor = 0.9);
/// 1 / k^{4 + 2 xi}; infinite at k = 0.
double catalyst_tolerance_nsc(long k, double xi);

}  // namespace extralab
