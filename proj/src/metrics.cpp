#include "extralab/metrics.hpp"

#include <cmath>

#include "extralab/csv.hpp"
#include "extralab/errors.hpp"

namespace extralab {

namespace {
constexpr double kDualRecoveryTolerance = 1e-8;
}

double objective_gap(const SmoothObjective& obj, const ReferenceSolution& ref, const RowMatrix& x) {
  const Eigen::VectorXd mean = x.colwise().mean().transpose();
  return global_value(obj, mean) - ref.f_star;
}

double consensus_violation(const RowMatrix& x) {
  return ConsensusOperators::project_disagreement(x).squaredNorm() / static_cast<double>(x.rows());
}

LyapunovOracle::LyapunovOracle(ReferenceSolution reference, double smoothness, double beta,
                               const ConsensusOperators& ops)
    : reference_(std::move(reference)),
      smoothness_(smoothness),
      beta_(beta),
      u_sqrt_(ops.u_sqrt),
      u_pinv_(ops.u_pinv) {
  if (!(beta > 0.0)) throw ArgumentError("beta must be positive");
  stacked_x_star_ = reference_.stacked_x_star();
}

RowMatrix LyapunovOracle::recover_dual(const RowMatrix& v) const {
  RowMatrix lambda = u_pinv_ * v;
  const double defect = (u_sqrt_ * lambda - v).norm();
  if (defect > kDualRecoveryTolerance * std::max(1.0, v.norm())) {
    throw DualRecoveryError("dual surrogate has a component outside Span(U) (defect " + format_double(defect) + ")");
  }
  return lambda;
}

double LyapunovOracle::rho(const ExtraState& state) const {
  const RowMatrix lambda = recover_dual(state.v);
  return (smoothness_ + beta_) * (state.x - stacked_x_star_).squaredNorm() +
         (lambda - reference_.lambda_star).squaredNorm() / (2.0 * beta_);
}

double lyapunov_rho(const LyapunovOracle& oracle, const ExtraState& state) { return oracle.rho(state); }

double theorem1_delta(double smoothness, double strong_convexity, double sigma2) {
  if (!(strong_convexity > 0.0)) throw ArgumentError("contraction factor needs mu > 0");
  if (sigma2 >= 1.0) throw ArgumentError("graph is disconnected (sigma2 = 1)");
  return 1.0 / (39.0 * (smoothness / strong_convexity + 1.0 / (1.0 - sigma2)));
}

double theorem1_delta(const SmoothObjective& obj, const WeightMatrix& w) {
  return theorem1_delta(obj.smoothness(), obj.strong_convexity(), w.sigma2());
}

long lemma1_min_iterations(double sigma2) {
  if (sigma2 >= 1.0) throw ArgumentError("graph is disconnected (sigma2 = 1)");
  return static_cast<long>(std::ceil(1.0 / std::sqrt(1.0 - sigma2) - 1e-12));
}

Lemma1Bounds lemma1_bounds(double smoothness, const ProblemRadii& radii, double sigma2, long k) {
  const long k_min = lemma1_min_iterations(sigma2);
  if (k < k_min) {
    throw ArgumentError("bounds need K >= " + std::to_string(k_min) + ", got " + std::to_string(k));
  }
  const double gap = 1.0 - sigma2;
  const double kk = static_cast<double>(k);
  const double l = smoothness;
  Lemma1Bounds b;
  b.gap_bound = 34.0 * (l * radii.r1 + radii.r2 / l) / (kk * std::sqrt(gap));
  b.consensus_bound = 16.0 * (radii.r1 + radii.r2 / (l * l)) / (kk * kk * gap);
  return b;
}

Lemma1Bounds lemma1_bounds(const SmoothObjective& obj, const ProblemRadii& radii, const WeightMatrix& w, long k) {
  return lemma1_bounds(obj.smoothness(), radii, w.sigma2(), k);
}

TraceRecorder::TraceRecorder(const SmoothObjective& obj, const ReferenceSolution& ref, std::string label)
    : obj_(obj), ref_(ref), start_(std::chrono::steady_clock::now()) {
  trace_.label = std::move(label);
}

IterationRecord TraceRecorder::make_record(long iter, const ExtraState& state, const RowMatrix& output,
                                           CostCounters cost) const {
  IterationRecord r;
  r.iter = iter;
  r.comm_rounds = cost.comm_rounds;
  r.grad_rounds = cost.grad_rounds;
  r.objective_gap = objective_gap(obj_, ref_, output);
  r.consensus_violation = consensus_violation(output);
  if (lyapunov_) r.rho = lyapunov_->rho(state);
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  return r;
}

void TraceRecorder::record_initial(const ExtraState& state) {
  trace_.records.push_back(make_record(0, state, state.x, {}));
}

bool TraceRecorder::on_iteration(const IterationView& view) {
  const bool scheduled = view.iter % record_every_ == 0;
  bool stop = (stop_.max_grad_rounds > 0 && view.cost.grad_rounds >= stop_.max_grad_rounds) ||
              (stop_.max_comm_rounds > 0 && view.cost.comm_rounds >= stop_.max_comm_rounds);
  if (!scheduled && !stop && stop_.target_gap <= 0.0) return true;

  IterationRecord r = make_record(view.iter, view.state, view.output, view.cost);
  if (stop_.target_gap > 0.0 && r.objective_gap <= stop_.target_gap) {
    target_reached_ = true;
    stop = true;
  }
  if (scheduled || stop) trace_.records.push_back(r);
  return !stop;
}

std::uint64_t fingerprint_of(const std::string& canonical) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace extralab
