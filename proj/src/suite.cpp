#include "extralab/suite.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

#include "extralab/catalyst.hpp"
#include "extralab/errors.hpp"
#include "extralab/extra.hpp"
#include "extralab/svg.hpp"
#include "extralab/trace_io.hpp"

namespace extralab {

namespace {

long step_budget(const BudgetConfig& b) {
  long steps = b.max_grad_rounds > 0 ? b.max_grad_rounds : b.max_comm_rounds / 2;
  if (b.max_grad_rounds > 0 && b.max_comm_rounds > 0) steps = std::min(steps, b.max_comm_rounds / 2);
  return std::max(steps, 1L);
}

StronglyConvexVariant sc_variant(const AlgorithmOverrides& o) {
  return o.variant.value_or("theory") == "practical" ? StronglyConvexVariant::practical
                                                     : StronglyConvexVariant::theory;
}

OriginalVariant original_variant(const AlgorithmOverrides& o) {
  const std::string v = o.variant.value_or("practical");
  if (v == "mu_over_l_squared") return OriginalVariant::mu_over_l_squared;
  if (v == "mu_squared_over_l") return OriginalVariant::mu_squared_over_l;
  return OriginalVariant::practical;
}

}  // namespace

bool SuiteResult::ok() const {
  return std::all_of(variants.begin(), variants.end(), [](const VariantOutcome& v) { return v.error.empty(); });
}

bool SuiteResult::any_diverged() const {
  return std::any_of(variants.begin(), variants.end(), [](const VariantOutcome& v) { return v.diverged; });
}

int suite_thread_count() {
  if (const char* env = std::getenv("EXTRALAB_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SuiteProblem build_suite_problem(const ExperimentConfig& config) {
  const ProblemConfig& p = config.problem;
  auto obj = gen_least_squares(p.n, p.s, p.m, p.mu, p.seed);
  Graph graph = build_graph(config.graph, p.m);
  WeightMatrix w = metropolis_lazy_weights(graph);
  ConsensusOperators ops = matrix_sqrt_half(w);
  ReferenceSolution ref = solve_reference(*obj, ops);
  return SuiteProblem{std::move(obj), std::move(graph), std::move(w), std::move(ops), std::move(ref)};
}

Trace run_variant(const ExperimentConfig& config, const AlgorithmConfig& algorithm, const SuiteProblem& problem,
                  bool* target_reached) {
  const SmoothObjective& obj = *problem.objective;
  const WeightMatrix& w = problem.weights;
  const AlgorithmOverrides& o = algorithm.overrides;
  const long steps = step_budget(config.budget);

  TraceRecorder recorder(obj, problem.reference, algorithm.label());
  recorder.set_stop_rule({config.budget.target_gap, config.budget.max_grad_rounds, config.budget.max_comm_rounds});
  recorder.set_record_every(config.output.record_every);
  recorder.set_fingerprint(fingerprint_of(canonical_run_description(config, algorithm)));

  const ExtraState init = ExtraState::zeros(obj.agents(), obj.dim());

  auto run_plain = [&](ExtraConfig cfg) {
    recorder.set_lyapunov(LyapunovOracle(problem.reference, obj.smoothness(), cfg.beta, problem.ops));
    recorder.record_initial(init);
    run_extra(obj, w, cfg, init, &recorder);
  };

  switch (algorithm.name) {
    case AlgorithmName::extra_sc: {
      ExtraConfig cfg = preset_strongly_convex(obj, w, steps, sc_variant(o));
      if (o.alpha) cfg.alpha = *o.alpha;
      if (o.beta) cfg.beta = *o.beta;
      run_plain(cfg);
      break;
    }
    case AlgorithmName::extra_nsc: {
      ExtraConfig cfg = preset_nonstrongly_convex(obj, w, steps);
      if (o.alpha) cfg.alpha = *o.alpha;
      if (o.beta) cfg.beta = *o.beta;
      run_plain(cfg);
      break;
    }
    case AlgorithmName::extra_original: {
      ExtraConfig cfg = preset_original(obj, steps, original_variant(o));
      if (o.alpha) {
        cfg.alpha = *o.alpha;
        cfg.beta = 1.0 / *o.alpha;
      }
      run_plain(cfg);
      break;
    }
    case AlgorithmName::extra_two_stage: {
      ProblemRadii radii = estimate_radii(problem.reference, init.x);
      if (config.sizing.r1_hat) radii.r1 = *config.sizing.r1_hat;
      if (config.sizing.r2_hat) radii.r2 = *config.sizing.r2_hat;
      const double eps = o.epsilon.value_or(config.sizing.epsilon);
      recorder.record_initial(init);
      run_two_stage_regularized(problem.objective, w, eps, radii, init, &recorder);
      break;
    }
    case AlgorithmName::acc_extra: {
      CatalystConfig cfg = default_catalyst_config(obj, w, steps);
      if (o.tau) cfg.tau = *o.tau;
      cfg.inner_variant = sc_variant(o);
      const ConvexityMode mode =
          obj.strong_convexity() > 0.0 ? ConvexityMode::strongly_convex : ConvexityMode::nonstrongly_convex;
      if (o.schedule == "theory") cfg.inner_iterations = tk_schedule(obj, w, mode, InnerScheduleRule::theory, cfg.tau);
      if (o.inner_iterations) {
        const long t = *o.inner_iterations;
        cfg.inner_iterations = [t](long) { return t; };
      }
      // Only whole outer steps that fit in the round budget.
      long used = 0, outer = 0;
      while ((used += cfg.inner_iterations(outer) + 1) <= steps) ++outer;
      cfg.outer_iterations = outer;
      recorder.record_initial(init);
      run_acc_extra(problem.objective, w, cfg, init.x, &recorder);
      break;
    }
  }
  if (target_reached) *target_reached = recorder.target_reached();
  return recorder.take_trace();
}

SuiteResult run_suite(const ExperimentConfig& config, const SuiteOptions& options) {
  const SuiteProblem problem = build_suite_problem(config);
  const std::filesystem::path out_dir = options.out_dir.value_or(config.output.csv_dir);
  std::filesystem::create_directories(out_dir);

  SuiteResult result;
  result.sigma2 = problem.weights.sigma2();
  result.smoothness = problem.objective->smoothness();
  result.variants.resize(config.algorithms.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < config.algorithms.size(); i = next++) {
      const AlgorithmConfig& alg = config.algorithms[i];
      VariantOutcome& out = result.variants[i];
      out.label = alg.label();
      try {
        out.trace = run_variant(config, alg, problem, &out.target_reached);
        out.csv = out_dir / (out.label + ".csv");
        write_trace_csv(out.csv, *out.trace);
      } catch (const DivergenceError& e) {
        out.diverged = true;
        out.error = e.what();
      } catch (const std::exception& e) {
        out.error = e.what();
      }
    }
  };

  const int threads = std::min<int>(options.threads > 0 ? options.threads : suite_thread_count(),
                                    static_cast<int>(config.algorithms.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (options.svg.value_or(config.output.svg)) {
    std::vector<Trace> traces;
    for (const auto& v : result.variants)
      if (v.trace) traces.push_back(*v.trace);
    if (!traces.empty()) {
      const auto gap_path = out_dir / "objective_gap.svg";
      const auto cons_path = out_dir / "consensus_violation.svg";
      emit_svg(traces, PlotXAxis::grad_rounds, PlotYAxis::objective_gap, gap_path);
      emit_svg(traces, PlotXAxis::grad_rounds, PlotYAxis::consensus_violation, cons_path);
      result.plots = {gap_path, cons_path};
    }
  }
  return result;
}

}  // namespace extralab
