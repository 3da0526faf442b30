#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "extralab/graph.hpp"
#include "extralab/objective.hpp"
#include "extralab/state.hpp"

namespace extralab {

struct IterationRecord {
  long iter = 0;
  long comm_rounds = 0;
  long grad_rounds = 0;
  double objective_gap = 0.0;
  double consensus_violation = 0.0;
  std::optional<double> rho;
  double wall_time = 0.0;

  bool operator==(const IterationRecord&) const = default;
};

struct Trace {
  std::string label;
  std::uint64_t fingerprint = 0;
  std::vector<IterationRecord> records;
};

/// F(mean row of x) - F*.
double objective_gap(const SmoothObjective& obj, const ReferenceSolution& ref, const RowMatrix& x);

/// (1/m) ||Pi x||_F^2, the mean squared distance of the rows to their average.
double consensus_violation(const RowMatrix& x);

/// Evaluates rho_k = (L + beta)||X - X*||^2 + ||lambda - lambda*||^2 / (2 beta),
/// recovering lambda = U^+ V from the dual surrogate.
class LyapunovOracle {
 public:
  LyapunovOracle(ReferenceSolution reference, double smoothness, double beta, const ConsensusOperators& ops);

  /// Throws DualRecoveryError when V is not in the range of U.
  RowMatrix recover_dual(const RowMatrix& v) const;
  double rho(const ExtraState& state) const;

  const ReferenceSolution& reference() const { return reference_; }
  double beta() const { return beta_; }

 private:
  ReferenceSolution reference_;
  RowMatrix stacked_x_star_;
  double smoothness_;
  double beta_;
  Eigen::MatrixXd u_sqrt_;
  Eigen::MatrixXd u_pinv_;
};

double lyapunov_rho(const LyapunovOracle& oracle, const ExtraState& state);

/// Per-step contraction factor 1/(39 (L/mu + 1/(1 - sigma2))) of the
/// Lyapunov value under alpha = 1/(4L), beta = L.
double theorem1_delta(double smoothness, double strong_convexity, double sigma2);
double theorem1_delta(const SmoothObjective& obj, const WeightMatrix& w);

struct Lemma1Bounds {
  double gap_bound = 0.0;
  double consensus_bound = 0.0;
};

/// Sublinear bounds on the averaged iterate of the nonstrongly convex
/// preset after K steps. Requires K >= ceil(1/sqrt(1 - sigma2)).
Lemma1Bounds lemma1_bounds(double smoothness, const ProblemRadii& radii, double sigma2, long k);
Lemma1Bounds lemma1_bounds(const SmoothObjective& obj, const ProblemRadii& radii, const WeightMatrix& w, long k);
long lemma1_min_iterations(double sigma2);

/// What a run hands to its sink after every step (outer step for Catalyst).
struct IterationView {
  long iter;
  const ExtraState& state;
  const RowMatrix& output;  // the iterate the method would return now
  CostCounters cost;
};

class IterationSink {
 public:
  virtual ~IterationSink() = default;
  /// Returns false to stop the run after this iteration.
  virtual bool on_iteration(const IterationView& view) = 0;
};

struct StopRule {
  double target_gap = 0.0;  // <= 0 disables
  long max_grad_rounds = 0;  // <= 0 disables
  long max_comm_rounds = 0;  // <= 0 disables
};

/// Builds a Trace from iteration views. Single writer: one run per recorder.
class TraceRecorder final : public IterationSink {
 public:
  TraceRecorder(const SmoothObjective& obj, const ReferenceSolution& ref, std::string label);

  void set_lyapunov(LyapunovOracle oracle) { lyapunov_.emplace(std::move(oracle)); }
  void set_stop_rule(StopRule rule) { stop_ = rule; }
  void set_record_every(long every) { record_every_ = every < 1 ? 1 : every; }
  void set_fingerprint(std::uint64_t fp) { trace_.fingerprint = fp; }

  /// Records the starting point as iteration 0.
  void record_initial(const ExtraState& state);
  bool on_iteration(const IterationView& view) override;

  const Trace& trace() const { return trace_; }
  Trace take_trace() { return std::move(trace_); }
  bool target_reached() const { return target_reached_; }

 private:
  IterationRecord make_record(long iter, const ExtraState& state, const RowMatrix& output, CostCounters cost) const;

  const SmoothObjective& obj_;
  const ReferenceSolution& ref_;
  std::optional<LyapunovOracle> lyapunov_;
  StopRule stop_;
  long record_every_ = 1;
  bool target_reached_ = false;
  std::chrono::steady_clock::time_point start_;
  Trace trace_;
};

/// FNV-1a over a canonical description of a run.
std::uint64_t fingerprint_of(const std::string& canonical);

}  // namespace extralab
