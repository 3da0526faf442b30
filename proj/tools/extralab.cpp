// extralab: run decentralized optimization experiments from a JSON config.
//
//   extralab run <config.json> [--out DIR] [--svg] [--seed-override N]
//   extralab graph-info <config.json>
//   extralab validate <config.json>
//
// Exit codes: 0 success, 1 other failure, 2 config error, 3 divergence.

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "extralab/config.hpp"
#include "extralab/errors.hpp"
#include "extralab/graph.hpp"
#include "extralab/suite.hpp"

using namespace extralab;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;

int cmd_run(const std::string& path, const std::string& out, bool svg, long long seed_override) {
  ExperimentConfig cfg = parse_config(path);
  if (seed_override >= 0) {
    cfg.problem.seed = static_cast<std::uint64_t>(seed_override);
    cfg.graph.seed = static_cast<std::uint64_t>(seed_override);
  }
  SuiteOptions opts;
  if (!out.empty()) opts.out_dir = out;
  if (svg) opts.svg = true;

  const SuiteResult result = run_suite(cfg, opts);
  std::printf("sigma2 = %.6g, L = %.6g\n", result.sigma2, result.smoothness);
  for (const auto& v : result.variants) {
    if (!v.error.empty()) {
      std::printf("%-20s FAILED: %s\n", v.label.c_str(), v.error.c_str());
      continue;
    }
    const auto& last = v.trace->records.back();
    std::printf("%-20s grad_rounds=%ld gap=%.3e consensus=%.3e%s -> %s\n", v.label.c_str(), last.grad_rounds,
                last.objective_gap, last.consensus_violation, v.target_reached ? " (target reached)" : "",
                v.csv.string().c_str());
  }
  for (const auto& p : result.plots) std::printf("plot: %s\n", p.string().c_str());
  if (result.any_diverged()) return kExitDivergence;
  return result.ok() ? 0 : kExitFailure;
}

int cmd_graph_info(const std::string& path) {
  const ExperimentConfig cfg = parse_config(path);
  const Graph g = build_graph(cfg.graph, cfg.problem.m);
  const WeightMatrix w = metropolis_lazy_weights(g);
  std::printf("m = %d\nedges = %zu\nsigma2 = %.17g\n1/(1-sigma2) = %.17g\n", g.agents(), g.edges().size(), w.sigma2(),
              1.0 / (1.0 - w.sigma2()));
  return 0;
}

int cmd_validate(const std::string& path) {
  const ExperimentConfig cfg = parse_config(path);
  std::printf("ok: %zu algorithm(s)\n", cfg.algorithms.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized EXTRA / Catalyst experiment runner"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  bool svg = false;
  long long seed_override = -1;

  auto* run = app.add_subcommand("run", "Run every algorithm in a config and write CSV traces");
  run->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides output.csv_dir)");
  run->add_flag("--svg", svg, "Also write SVG convergence plots");
  run->add_option("--seed-override", seed_override, "Replace problem and graph seeds")->check(CLI::NonNegativeNumber);

  auto* info = app.add_subcommand("graph-info", "Print graph size and spectral gap");
  info->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) return cmd_run(config_path, out_dir, svg, seed_override);
    if (*info) return cmd_graph_info(config_path);
    if (*validate) return cmd_validate(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DivergenceError& e) {
    std::cerr << "diverged: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
