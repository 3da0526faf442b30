// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "extralab/catalyst.hpp"
#include "extralab/config.hpp"
#include "extralab/extra.hpp"
#include "extralab/metrics.hpp"
#include "extralab/suite.hpp"

using namespace extralab;
namespace fs = std::filesystem;

namespace {

class LambdaSink final : public IterationSink {
 public:
  explicit LambdaSink(std::function<bool(const IterationView&)> f) : f_(std::move(f)) {}
  bool on_iteration(const IterationView& v) override { return f_(v); }

 private:
  std::function<bool(const IterationView&)> f_;
};

struct Instance {
  std::shared_ptr<const LeastSquaresObjective> obj;
  WeightMatrix w;
  ConsensusOperators ops;
  ReferenceSolution ref;
};

Instance make_instance(int n, int s, int m, double mu, const Graph& g, std::uint64_t seed) {
  auto obj = gen_least_squares(n, s, m, mu, seed);
  WeightMatrix w = metropolis_lazy_weights(g);
  ConsensusOperators ops = matrix_sqrt_half(w);
  ReferenceSolution ref = solve_reference(*obj, ops);
  return {std::move(obj), std::move(w), std::move(ops), std::move(ref)};
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Exact minimum of (1/m) sum_i g_i over a single shared x from a quadratic model.
double quadratic_minimum(const SmoothObjective& g) {
  const QuadraticModel q = *g.quadratic_model();
  const int n = g.dim();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < q.hessians.size(); ++i) {
    h += q.hessians[i];
    c += q.linear[i];
  }
  const Eigen::VectorXd x = h.ldlt().solve(c);
  return global_value(g, x);
}

Outcome contraction() {
  const auto start = std::chrono::steady_clock::now();
  double worst = -1.0;
  int instances = 0;
  for (double mu : {1e-2, 1e-4}) {
    for (int family = 0; family < 2; ++family) {
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Graph g = family == 0 ? gen_ring(10) : gen_erdos_renyi(10, 0.5, seed);
        const Instance d = make_instance(5, 3, 10, mu, g, seed);
        const double l = d.obj->smoothness();
        const double delta = theorem1_delta(*d.obj, d.w);
        const LyapunovOracle oracle(d.ref, l, l, d.ops);
        double prev = oracle.rho(ExtraState::zeros(10, 5));
        LambdaSink sink([&](const IterationView& v) {
          const double cur = oracle.rho(v.state);
          worst = std::max(worst, (cur - (1.0 - delta) * prev) / prev);
          prev = cur;
          return true;
        });
        run_extra(*d.obj, d.w, preset_strongly_convex(*d.obj, d.w, 301), ExtraState::zeros(10, 5), &sink);
        ++instances;
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst <= 1e-9 && secs < 30.0, std::to_string(instances) + " instances, worst relative excess " +
                                            fmt("%.3g", worst) + ", " + fmt("%.2f", secs) + " s"};
}

Outcome two_term_recurrence() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance d = make_instance(5, 3, 10, 1e-2, gen_erdos_renyi(10, 0.5, seed), seed);
    const ExtraConfig c = preset_original(*d.obj, 1);
    const Eigen::MatrixXd ipw = Eigen::MatrixXd::Identity(10, 10) + d.w.entries();
    std::mt19937 rng(static_cast<unsigned>(seed));
    std::normal_distribution<double> gauss;
    RowMatrix x0(10, 5);
    for (Eigen::Index i = 0; i < x0.size(); ++i) x0.data()[i] = gauss(rng);

    RowMatrix prev = x0;
    RowMatrix cur = 0.5 * ipw * x0 - c.alpha * stacked_gradient(*d.obj, x0);
    ExtraState s = extra_step(ExtraState::from_primal(x0), *d.obj, d.w, c);
    worst = std::max(worst, (s.x - cur).norm() / cur.norm());
    for (int k = 1; k < 100; ++k) {
      const RowMatrix next =
          ipw * cur - 0.5 * ipw * prev - c.alpha * (stacked_gradient(*d.obj, cur) - stacked_gradient(*d.obj, prev));
      prev = cur;
      cur = next;
      s = extra_step(s, *d.obj, d.w, c);
      worst = std::max(worst, (s.x - cur).norm() / std::max(1e-300, cur.norm()));
    }
  }
  return {worst <= 1e-10, "10 seeds x 100 iterations, worst relative deviation " + fmt("%.3g", worst)};
}

Outcome lemma1() {
  double worst_gap = 0.0, worst_cons = 0.0;
  long checks = 0;
  for (int family = 0; family < 2; ++family) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const Graph g = family == 0 ? gen_ring(10) : gen_erdos_renyi(10, 0.5, seed);
      const Instance d = make_instance(5, 3, 10, 0.0, g, seed);
      const RowMatrix x0 = RowMatrix::Zero(10, 5);
      const ProblemRadii radii = estimate_radii(d.ref, x0);
      const long k_min = lemma1_min_iterations(d.w.sigma2());
      LambdaSink sink([&](const IterationView& v) {
        if (v.iter >= k_min) {
          const Lemma1Bounds b = lemma1_bounds(*d.obj, radii, d.w, v.iter);
          worst_gap = std::max(worst_gap, objective_gap(*d.obj, d.ref, v.output) / b.gap_bound);
          worst_cons = std::max(worst_cons, consensus_violation(v.output) / b.consensus_bound);
          ++checks;
        }
        return true;
      });
      run_extra(*d.obj, d.w, preset_nonstrongly_convex(*d.obj, d.w, 500), ExtraState::from_primal(x0), &sink);
    }
  }
  return {worst_gap <= 1.0 && worst_cons <= 1.0, std::to_string(checks) + " checks, max gap/bound " +
                                                     fmt("%.3g", worst_gap) + ", max consensus/bound " +
                                                     fmt("%.3g", worst_cons)};
}

Outcome exact_convergence() {
  bool pass = true;
  long worst_used = 0, worst_budget = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Instance d = make_instance(5, 3, 10, 1e-2, gen_erdos_renyi(10, 0.5, seed), seed);
    const double l = d.obj->smoothness();
    const long budget =
        10 * static_cast<long>(std::ceil((l / 1e-2 + 1.0 / d.w.spectral_gap()) * std::log(1e10)));
    long reached = -1;
    LambdaSink sink([&](const IterationView& v) {
      if (objective_gap(*d.obj, d.ref, v.output) < 1e-10 && consensus_violation(v.output) < 1e-10) {
        reached = v.iter;
        return false;
      }
      return true;
    });
    run_extra(*d.obj, d.w, preset_strongly_convex(*d.obj, d.w, budget), ExtraState::zeros(10, 5), &sink);
    if (reached < 0) pass = false;
    if (reached < 0 || static_cast<double>(reached) / budget > static_cast<double>(worst_used) / std::max(1L, worst_budget)) {
      worst_used = reached < 0 ? budget : reached;
      worst_budget = budget;
    }
  }
  return {pass, "3 seeds, worst " + std::to_string(worst_used) + " of " + std::to_string(worst_budget) + " iterations"};
}

Outcome theta() {
  ThetaSequence t = ThetaSequence::nonstrongly_convex();
  const double first = std::abs(t.next() - (std::sqrt(5.0) - 1.0) / 2.0);
  double residual = 0.0, excess = -1.0;
  for (long k = 0; k < 10000; ++k) {
    const double a = t.current();
    const double b = t.next();
    residual = std::max(residual, std::abs(b * b - (1.0 - b) * a * a));
    excess = std::max(excess, a - 2.0 / (k + 2.0));
    t.advance();
  }
  return {first <= 1e-12 && residual <= 1e-12 && excess <= 1e-9,
          "theta_1 error " + fmt("%.2g", first) + ", residual " + fmt("%.2g", residual) +
              ", max theta_k - 2/(k+2) " + fmt("%.2g", excess)};
}

Outcome subproblem_accuracy() {
  const Instance d = make_instance(10, 5, 20, 1e-6, gen_erdos_renyi(20, 0.5, 1), 1);
  const CatalystConfig cfg = default_catalyst_config(*d.obj, d.w, 30);
  const double q = 1e-6 / (1e-6 + cfg.tau);
  const double gap0 = objective_gap(*d.obj, d.ref, RowMatrix::Zero(20, 10));
  double worst = 0.0;
  run_acc_extra(d.obj, d.w, cfg, RowMatrix::Zero(20, 10), nullptr, [&](const OuterStep& s) {
    const Eigen::VectorXd mean = s.x_next.colwise().mean().transpose();
    const double inner_gap = global_value(s.subproblem, mean) - quadratic_minimum(s.subproblem);
    worst = std::max(worst, inner_gap / catalyst_tolerance_sc(gap0, q, s.k));
  });
  return {worst <= 1.0, "30 outer steps, max inner gap / eps_k " + fmt("%.3g", worst)};
}

long rounds_to_gap(const ExperimentConfig& config, const AlgorithmConfig& alg, const SuiteProblem& p, bool* ok) {
  const Trace t = run_variant(config, alg, p, ok);
  return t.records.back().grad_rounds;
}

Outcome acceleration() {
  bool pass = true;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    ExperimentConfig c;
    c.problem = {80, 5, 20, 1e-6, seed};
    c.graph = {GraphFamily::erdos_renyi, 0.5, seed};
    c.budget = {400000, 0, 1e-6};
    c.output.record_every = 1000;
    AlgorithmConfig plain{AlgorithmName::extra_original, {}};
    AlgorithmConfig acc{AlgorithmName::acc_extra, {}};
    acc.overrides.variant = "practical";
    const SuiteProblem p = build_suite_problem(c);
    const double conditioning = c.problem.mu / p.objective->smoothness();
    const double network = 1.0 / p.weights.spectral_gap();
    bool plain_ok = false, acc_ok = false;
    const long r_plain = rounds_to_gap(c, plain, p, &plain_ok);
    const long r_acc = rounds_to_gap(c, acc, p, &acc_ok);
    const double ratio = static_cast<double>(r_acc) / r_plain;
    const bool ok = plain_ok && acc_ok && conditioning <= 1e-6 && network <= 10.0 && ratio <= 0.7;
    pass = pass && ok;
    detail += (seed > 1 ? "; " : "") + std::string("seed ") + std::to_string(seed) + " " + std::to_string(r_acc) +
              "/" + std::to_string(r_plain) + "=" + fmt("%.3f", ratio) + " (1/(1-s2)=" + fmt("%.2f", network) + ")";
  }
  return {pass, detail};
}

Outcome two_stage() {
  const double eps = 1e-4;
  double worst_reg = 0.0, worst_f = 0.0, worst_cons = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Instance d = make_instance(5, 3, 10, 0.0, gen_erdos_renyi(10, 0.5, seed), seed);
    const RowMatrix x0 = RowMatrix::Zero(10, 5);
    const TwoStageResult r =
        run_two_stage_regularized(d.obj, d.w, eps, estimate_radii(d.ref, x0), ExtraState::from_primal(x0));
    const RowMatrix& out = *r.run.average;
    const ReferenceSolution reg_ref = solve_reference(*r.regularized, d.ops);
    worst_reg = std::max(worst_reg, objective_gap(*r.regularized, reg_ref, out) / eps);
    worst_f = std::max(worst_f, objective_gap(*d.obj, d.ref, out) / (eps + 0.5 * eps * d.ref.x_star.squaredNorm()));
    worst_cons = std::max(worst_cons, consensus_violation(out) / (eps * eps));
  }
  return {worst_reg <= 1.0 && worst_f <= 1.0 && worst_cons <= 1.0,
          "5 seeds, max F_eps gap/eps " + fmt("%.3g", worst_reg) + ", F gap/(eps + eps|x*|^2/2) " +
              fmt("%.3g", worst_f) + ", consensus/eps^2 " + fmt("%.3g", worst_cons)};
}

Outcome spectral() {
  const double pi = std::acos(-1.0);
  double worst = 0.0;
  for (int m = 4; m <= 64; ++m) {
    const double s2 = metropolis_lazy_weights(gen_ring(m)).sigma2();
    worst = std::max(worst, std::abs(s2 - (2.0 / 3.0 + std::cos(2.0 * pi / m) / 3.0)));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int sizes[] = {8, 16, 32, 64};
  for (int m : sizes) {
    const double x = std::log(m), y = std::log(1.0 / metropolis_lazy_weights(gen_line(m)).spectral_gap());
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
  return {worst <= 1e-9 && std::abs(slope - 2.0) <= 0.2,
          "ring max error " + fmt("%.2g", worst) + ", line exponent " + fmt("%.3f", slope)};
}

Outcome single_agent() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto obj = gen_least_squares(6, 4, 1, 0.05, seed);
    const WeightMatrix w(Eigen::MatrixXd::Ones(1, 1));
    const CatalystConfig cfg = default_catalyst_config(*obj, w, 20);
    const AccRun r = run_acc_extra(obj, w, cfg, RowMatrix::Zero(1, 6));

    const Eigen::MatrixXd a = obj->instance().a[0];
    const Eigen::VectorXd b = obj->instance().b[0];
    const double l = obj->smoothness(), mu = 0.05, tau = l - mu;
    const double step = 1.0 / (4.0 * (l + tau));
    const long inner = std::max(1L, static_cast<long>(std::ceil(std::log(l / mu) / 5.0))) + 1;
    const double sq = std::sqrt(mu / (mu + tau)), q = mu / (mu + tau);
    const double momentum = (sq - q) / (sq + q);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(6), y = x;
    for (int k = 0; k < 20; ++k) {
      const Eigen::VectorXd prev = x;
      for (long t = 0; t < inner; ++t) x -= step * (a * (a.transpose() * x - b) + mu * x + tau * (x - y));
      y = x + momentum * (x - prev);
    }
    worst = std::max(worst, (r.state.inner.x.row(0).transpose() - x).norm() / std::max(1.0, x.norm()));
  }
  return {worst <= 1e-8, "3 seeds x 20 outer steps, max deviation " + fmt("%.3g", worst)};
}

std::string csv_without_wall_time(const fs::path& p) {
  std::ifstream in(p);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + '\n';
  return out;
}

Outcome determinism() {
  bool pass = true;
  int files = 0;
  const fs::path scratch = fs::temp_directory_path() / "extralab_acceptance_determinism";
  for (const auto& entry : fs::directory_iterator(EXTRALAB_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    const ExperimentConfig c = parse_config(entry.path());
    const fs::path a = scratch / entry.path().stem() / "a", b = scratch / entry.path().stem() / "b";
    fs::remove_all(a);
    fs::remove_all(b);
    const SuiteResult ra = run_suite(c, {a, false, 0});
    const SuiteResult rb = run_suite(c, {b, false, 1});
    pass = pass && ra.ok() && rb.ok();
    for (const auto& v : ra.variants) {
      const fs::path name = v.csv.filename();
      pass = pass && fs::exists(a / name) && csv_without_wall_time(a / name) == csv_without_wall_time(b / name);
      ++files;
    }
  }
  fs::remove_all(scratch);
  return {pass && files > 0, std::to_string(files) + " CSVs compared across reruns"};
}

}  // namespace

int main() {
  const std::pair<const char*, Outcome (*)()> criteria[] = {
      {"1 contraction", contraction},
      {"2 two-term recurrence", two_term_recurrence},
      {"3 sublinear bounds", lemma1},
      {"4 exact convergence", exact_convergence},
      {"5 theta sequence", theta},
      {"6 subproblem accuracy", subproblem_accuracy},
      {"7 acceleration ordering", acceleration},
      {"8 two-stage regularized", two_stage},
      {"9 spectral", spectral},
      {"10 single-agent reduction", single_agent},
      {"11 determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
