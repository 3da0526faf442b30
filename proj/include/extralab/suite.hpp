#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "extralab/config.hpp"
#include "extralab/graph.hpp"
#include "extralab/metrics.hpp"
#include "extralab/objective.hpp"

namespace extralab {

struct VariantOutcome {
  std::string label;
  std::optional<Trace> trace;
  std::filesystem::path csv;
  std::string error;  // empty on success
  bool diverged = false;
  bool target_reached = false;
};

struct SuiteResult {
  double sigma2 = 0.0;
  double smoothness = 0.0;
  std::vector<VariantOutcome> variants;
  std::vector<std::filesystem::path> plots;

  bool ok() const;
  bool any_diverged() const;
};

struct SuiteOptions {
  std::optional<std::filesystem::path> out_dir;  // overrides output.csv_dir
  std::optional<bool> svg;                       // overrides output.svg
  int threads = 0;                               // 0: EXTRALAB_THREADS or hardware concurrency
};

/// Shared inputs of a suite: one instance, one graph, one reference.
struct SuiteProblem {
  std::shared_ptr<const LeastSquaresObjective> objective;
  Graph graph;
  WeightMatrix weights;
  ConsensusOperators ops;
  ReferenceSolution reference;
};

SuiteProblem build_suite_problem(const ExperimentConfig& config);

/// Runs one variant from the origin. Errors propagate.
Trace run_variant(const ExperimentConfig& config, const AlgorithmConfig& algorithm, const SuiteProblem& problem,
                  bool* target_reached = nullptr);

/// Runs every variant (in parallel), writing <label>.csv per variant and
/// optional SVG plots. A failing variant is reported and the rest continue.
SuiteResult run_suite(const ExperimentConfig& config, const SuiteOptions& options = {});

/// Thread cap from EXTRALAB_THREADS, else hardware concurrency, at least 1.
int suite_thread_count();

}  // namespace extralab
