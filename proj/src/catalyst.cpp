#include "extralab/catalyst.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "extralab/csv.hpp"
#include "extralab/errors.hpp"

namespace extralab {

namespace {

long at_least_one(double count) {
  if (!std::isfinite(count)) throw ArgumentError("inner iteration count is not finite");
  return std::max(1L, static_cast<long>(std::ceil(count)));
}

double spectral_gap_checked(const WeightMatrix& w) {
  if (w.sigma2() >= 1.0) throw ArgumentError("graph is disconnected (sigma2 = 1)");
  return 1.0 - w.sigma2();
}

}  // namespace

ThetaSequence ThetaSequence::strongly_convex(double q) {
  if (!(q > 0.0 && q <= 1.0)) throw ArgumentError("q must lie in (0, 1]");
  return ThetaSequence(ConvexityMode::strongly_convex, q, std::sqrt(q));
}

ThetaSequence ThetaSequence::nonstrongly_convex() { return ThetaSequence(ConvexityMode::nonstrongly_convex, 0.0, 1.0); }

double theta_root(double theta) {
  const double t2 = theta * theta;
  const double root = 2.0 * t2 / (t2 + std::sqrt(t2 * t2 + 4.0 * t2));
  return std::clamp(root, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

double ThetaSequence::next() const {
  return mode_ == ConvexityMode::strongly_convex ? std::sqrt(q_) : theta_root(theta_);
}

void ThetaSequence::advance() {
  theta_ = next();
  ++index_;
}

double theta_next(const ThetaSequence& seq) { return seq.next(); }

double extrapolation_coefficient(double theta_k, double theta_next) {
  return theta_k * (1.0 - theta_k) / (theta_k * theta_k + theta_next);
}

double tau_default(const SmoothObjective& obj, const WeightMatrix& w) {
  const double base = obj.smoothness() * spectral_gap_checked(w);
  const double mu = obj.strong_convexity();
  if (mu > 0.0) {
    if (base <= mu) {
      throw ArgumentError(
          "acceleration not applicable: condition number below network threshold; run plain EXTRA");
    }
    return base - mu;
  }
  return base;
}

InnerSchedule tk_schedule(const SmoothObjective& obj, const WeightMatrix& w, ConvexityMode mode,
                          InnerScheduleRule rule, double tau) {
  const double gap = spectral_gap_checked(w);
  const double l = obj.smoothness();
  const double mu = obj.strong_convexity();
  if (mode == ConvexityMode::strongly_convex && mu <= 0.0) {
    throw ArgumentError("strongly convex schedule needs mu > 0");
  }
  if (rule == InnerScheduleRule::theory && tau <= 0.0) tau = tau_default(obj, w);

  if (mode == ConvexityMode::strongly_convex) {
    long count = 0;
    if (rule == InnerScheduleRule::experimental) {
      count = at_least_one(std::log(l / (mu * gap)) / (5.0 * gap));
    } else {
      const double lg = l + tau;
      count = at_least_one((lg / (mu + tau) + 1.0 / gap) * std::log(lg / (mu * gap)));
    }
    return [count](long) { return count; };
  }
  if (rule == InnerScheduleRule::experimental) {
    return [gap](long k) { return at_least_one(std::log((k + 1.0) / gap) / (2.0 * gap)); };
  }
  const double factor = (l + tau) / tau + 1.0 / gap;
  return [gap, factor](long k) { return at_least_one(factor * std::log((k + 1.0) / gap)); };
}

CatalystConfig default_catalyst_config(const SmoothObjective& obj, const WeightMatrix& w, long outer_iterations) {
  const ConvexityMode mode =
      obj.strong_convexity() > 0.0 ? ConvexityMode::strongly_convex : ConvexityMode::nonstrongly_convex;
  CatalystConfig c;
  c.tau = tau_default(obj, w);
  c.inner_iterations = tk_schedule(obj, w, mode);
  c.outer_iterations = outer_iterations;
  return c;
}

AccRun run_acc_extra(ObjectivePtr obj, const WeightMatrix& w, const CatalystConfig& config, RowMatrix x0,
                     IterationSink* sink, const OuterObserver& observer) {
  if (!obj) throw ArgumentError("objective is null");
  if (!(config.tau > 0.0)) throw ArgumentError("tau must be positive");
  if (!(config.xi > 0.0)) throw ArgumentError("xi must be positive");
  if (!config.inner_iterations) throw ArgumentError("inner iteration schedule is missing");
  if (config.outer_iterations < 0) throw ArgumentError("outer iteration count must be non-negative");
  if (w.agents() != obj->agents()) throw ArgumentError("weight matrix size does not match agent count");
  if (x0.rows() != obj->agents() || x0.cols() != obj->dim()) throw ArgumentError("initial iterate has wrong shape");

  const double mu = obj->strong_convexity();
  const double lg = obj->smoothness() + config.tau;
  ExtraConfig inner;
  inner.beta = lg;
  inner.alpha = config.inner_variant == StronglyConvexVariant::theory ? 1.0 / (4.0 * lg) : 1.0 / lg;

  AccRun run{AccState{ExtraState::from_primal(x0), x0,
                      mu > 0.0 ? ThetaSequence::strongly_convex(mu / (mu + config.tau))
                               : ThetaSequence::nonstrongly_convex(),
                      0},
             {},
             false};
  AccState& s = run.state;
  RowMatrix x_prev;

  for (long k = 0; k < config.outer_iterations; ++k) {
    const long tk = config.inner_iterations(k);
    if (tk < 1) throw ArgumentError("inner iteration count must be at least 1");
    inner.steps = tk + 1;
    const ObjectivePtr sub = shift_proximal(obj, config.tau, s.y);
    x_prev = s.inner.x;
    try {
      ExtraRun r = run_extra(*sub, w, inner, std::move(s.inner), nullptr, run.cost);
      s.inner = std::move(r.state);
      run.cost = r.cost;
    } catch (const DivergenceError& e) {
      throw DivergenceError("outer step " + std::to_string(k) + ": " + e.what(), e.iteration(), e.norm());
    }

    const double coeff = extrapolation_coefficient(s.theta.current(), s.theta.next());
    s.y = s.inner.x + coeff * (s.inner.x - x_prev);
    s.theta.advance();
    s.k = k + 1;

    if (observer) observer(OuterStep{k, tk + 1, *sub, x_prev, s.inner.x, s.y, coeff});
    if (sink && !sink->on_iteration({s.k, s.inner, s.inner.x, run.cost})) {
      run.stopped_early = true;
      break;
    }
  }
  return run;
}

double catalyst_tolerance_sc(double initial_gap, double q, long k, double rho_factor) {
  const double rho = rho_factor * std::sqrt(q);
  return 2.0 * initial_gap / 9.0 * std::pow(1.0 - rho, static_cast<double>(k + 1));
}

double catalyst_tolerance_nsc(long k, double xi) {
  if (k <= 0) return std::numeric_limits<double>::infinity();
  return 1.0 / std::pow(static_cast<double>(k), 4.0 + 2.0 * xi);
}

}  // namespace extralab
