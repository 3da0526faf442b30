#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "extralab/graph.hpp"

namespace extralab {

enum class GraphFamily { erdos_renyi, geometric, ring, line };
enum class AlgorithmName { extra_sc, extra_nsc, extra_original, extra_two_stage, acc_extra };

std::string to_string(GraphFamily family);
std::string to_string(AlgorithmName name);

struct ProblemConfig {
  int n = 50;
  int s = 10;
  int m = 20;
  double mu = 1e-6;
  std::uint64_t seed = 1;

  bool operator==(const ProblemConfig&) const = default;
};

struct GraphConfig {
  GraphFamily family = GraphFamily::ring;
  std::optional<double> param;  // edge probability or connection radius
  std::uint64_t seed = 1;

  double param_or_default() const { return param.value_or(0.5); }

  bool operator==(const GraphConfig&) const = default;
};

// Per-algorithm knobs. Which keys are accepted depends on the algorithm:
//   extra_sc        label, variant (theory|practical), alpha, beta
//   extra_nsc       label, alpha, beta
//   extra_original  label, variant (practical|mu_over_l_squared|mu_squared_over_l), alpha
//   extra_two_stage label, epsilon
//   acc_extra       label, variant (theory|practical inner step), tau, schedule (experimental|theory), inner_iterations
struct AlgorithmOverrides {
  std::optional<std::string> label;
  std::optional<std::string> variant;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> epsilon;
  std::optional<double> tau;
  std::optional<std::string> schedule;
  std::optional<long> inner_iterations;

  bool operator==(const AlgorithmOverrides&) const = default;
};

struct AlgorithmConfig {
  AlgorithmName name = AlgorithmName::extra_sc;
  AlgorithmOverrides overrides;

  std::string label() const { return overrides.label.value_or(to_string(name)); }

  bool operator==(const AlgorithmConfig&) const = default;
};

struct BudgetConfig {
  long max_grad_rounds = 10000;  // 0 = unlimited
  long max_comm_rounds = 0;      // 0 = unlimited
  double target_gap = 0.0;       // 0 = run to budget

  bool operator==(const BudgetConfig&) const = default;
};

struct OutputConfig {
  std::string csv_dir = "traces";
  bool svg = false;
  long record_every = 1;

  bool operator==(const OutputConfig&) const = default;
};

// Constants for sizing the two-stage method; radii default to the oracle's.
struct SizingConfig {
  std::optional<double> r1_hat;
  std::optional<double> r2_hat;
  double epsilon = 1e-4;

  bool operator==(const SizingConfig&) const = default;
};

struct ExperimentConfig {
  ProblemConfig problem;
  GraphConfig graph;
  std::vector<AlgorithmConfig> algorithms;
  BudgetConfig budget;
  OutputConfig output;
  SizingConfig sizing;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Strict JSON parse: unknown keys, wrong types, bad enum values and
/// missing required fields raise ConfigError naming the field path.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::filesystem::path& path);

/// Canonical JSON with every field spelled out; parses back to an equal config.
std::string serialize_config(const ExperimentConfig& config);

/// Canonical JSON for one algorithm run, used for trace fingerprints.
std::string canonical_run_description(const ExperimentConfig& config, const AlgorithmConfig& algorithm);

Graph build_graph(const GraphConfig& graph, int agents);

}  // namespace extralab
