#include "extralab/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "extralab/errors.hpp"
#include "json.hpp"

namespace extralab {

using nlohmann::json;

namespace {

template <typename E>
struct EnumTable {
  std::vector<std::pair<E, const char*>> entries;

  const char* name(E e) const {
    for (const auto& [v, n] : entries)
      if (v == e) return n;
    return "?";
  }
  E parse(const std::string& text, const std::string& path) const {
    std::string options;
    for (const auto& [v, n] : entries) {
      if (text == n) return v;
      options += options.empty() ? n : std::string("|") + n;
    }
    throw ConfigError(path, "unknown value '" + text + "' (expected " + options + ")");
  }
};

const EnumTable<GraphFamily> kFamilies{{{GraphFamily::erdos_renyi, "erdos_renyi"},
                                        {GraphFamily::geometric, "geometric"},
                                        {GraphFamily::ring, "ring"},
                                        {GraphFamily::line, "line"}}};

const EnumTable<AlgorithmName> kAlgorithms{{{AlgorithmName::extra_sc, "extra_sc"},
                                            {AlgorithmName::extra_nsc, "extra_nsc"},
                                            {AlgorithmName::extra_original, "extra_original"},
                                            {AlgorithmName::extra_two_stage, "extra_two_stage"},
                                            {AlgorithmName::acc_extra, "acc_extra"}}};

const std::map<AlgorithmName, std::set<std::string>> kOverrideKeys{
    {AlgorithmName::extra_sc, {"label", "variant", "alpha", "beta"}},
    {AlgorithmName::extra_nsc, {"label", "alpha", "beta"}},
    {AlgorithmName::extra_original, {"label", "variant", "alpha"}},
    {AlgorithmName::extra_two_stage, {"label", "epsilon"}},
    {AlgorithmName::acc_extra, {"label", "variant", "tau", "schedule", "inner_iterations"}},
};

const std::map<AlgorithmName, std::set<std::string>> kVariants{
    {AlgorithmName::extra_sc, {"theory", "practical"}},
    {AlgorithmName::extra_original, {"practical", "mu_over_l_squared", "mu_squared_over_l"}},
    {AlgorithmName::acc_extra, {"theory", "practical"}},
};

// Walks one JSON object, tracking which keys were consumed.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  const json& required(const std::string& key) {
    if (!has(key)) throw ConfigError(field(key), "missing required field");
    return at(key);
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (has(key)) out = convert<T>(at(key), field(key));
  }

  template <typename T>
  void read(const std::string& key, std::optional<T>& out) {
    if (has(key)) out = convert<T>(at(key), field(key));
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      (void)value;
      if (!seen_.count(key)) throw ConfigError(field(key), "unknown key");
    }
  }

  template <typename T>
  static T convert(const json& v, const std::string& path) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(path, "expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(path, "expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigError(path, "expected a number");
      return v.get<double>();
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      if (!v.is_number_unsigned()) throw ConfigError(path, "expected a non-negative integer");
      return v.get<std::uint64_t>();
    } else {
      if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
      return v.get<T>();
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, message);
}

ProblemConfig parse_problem(const json& j) {
  ObjectReader r(j, "problem");
  ProblemConfig p;
  r.read("n", p.n);
  r.read("s", p.s);
  r.read("m", p.m);
  r.read("mu", p.mu);
  r.read("seed", p.seed);
  r.finish();
  require(p.n >= 1, "problem.n", "must be at least 1");
  require(p.s >= 1, "problem.s", "must be at least 1");
  require(p.m >= 1, "problem.m", "must be at least 1");
  require(p.mu >= 0.0, "problem.mu", "must be non-negative");
  return p;
}

GraphConfig parse_graph(const json& j) {
  ObjectReader r(j, "graph");
  GraphConfig g;
  g.family = kFamilies.parse(ObjectReader::convert<std::string>(r.required("family"), "graph.family"), "graph.family");
  r.read("param", g.param);
  r.read("seed", g.seed);
  r.finish();
  if (g.param) require(*g.param > 0.0, "graph.param", "must be positive");
  return g;
}

AlgorithmConfig parse_algorithm(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  AlgorithmConfig a;
  a.name = kAlgorithms.parse(ObjectReader::convert<std::string>(r.required("name"), r.field("name")), r.field("name"));
  if (r.has("overrides")) {
    const std::string opath = r.field("overrides");
    const json& o = r.at("overrides");
    if (!o.is_object()) throw ConfigError(opath, "expected an object");
    const auto& allowed = kOverrideKeys.at(a.name);
    for (const auto& [key, value] : o.items()) {
      (void)value;
      if (!allowed.count(key)) {
        throw ConfigError(opath + "." + key, "not an override of " + to_string(a.name));
      }
    }
    ObjectReader ro(o, opath);
    AlgorithmOverrides& ov = a.overrides;
    ro.read("label", ov.label);
    ro.read("variant", ov.variant);
    ro.read("alpha", ov.alpha);
    ro.read("beta", ov.beta);
    ro.read("epsilon", ov.epsilon);
    ro.read("tau", ov.tau);
    ro.read("schedule", ov.schedule);
    ro.read("inner_iterations", ov.inner_iterations);
    ro.finish();
    if (ov.label) require(!ov.label->empty(), opath + ".label", "must not be empty");
    if (ov.variant) {
      const auto& ok = kVariants.at(a.name);
      require(ok.count(*ov.variant) > 0, opath + ".variant", "unknown value '" + *ov.variant + "'");
    }
    if (ov.schedule) {
      require(*ov.schedule == "experimental" || *ov.schedule == "theory", opath + ".schedule",
              "unknown value '" + *ov.schedule + "' (expected experimental|theory)");
    }
    const std::pair<const char*, std::optional<double>> positives[] = {
        {"alpha", ov.alpha}, {"beta", ov.beta}, {"epsilon", ov.epsilon}, {"tau", ov.tau}};
    for (const auto& [key, value] : positives) {
      if (value) require(*value > 0.0, opath + "." + key, "must be positive");
    }
    if (ov.inner_iterations) require(*ov.inner_iterations >= 1, opath + ".inner_iterations", "must be at least 1");
  }
  r.finish();
  return a;
}

BudgetConfig parse_budget(const json& j) {
  ObjectReader r(j, "budget");
  BudgetConfig b;
  r.read("max_grad_rounds", b.max_grad_rounds);
  r.read("max_comm_rounds", b.max_comm_rounds);
  r.read("target_gap", b.target_gap);
  r.finish();
  require(b.max_grad_rounds >= 0, "budget.max_grad_rounds", "must be non-negative");
  require(b.max_comm_rounds >= 0, "budget.max_comm_rounds", "must be non-negative");
  require(b.target_gap >= 0.0, "budget.target_gap", "must be non-negative");
  require(b.max_grad_rounds > 0 || b.max_comm_rounds > 0, "budget", "needs a positive round limit");
  return b;
}

OutputConfig parse_output(const json& j) {
  ObjectReader r(j, "output");
  OutputConfig o;
  r.read("csv_dir", o.csv_dir);
  r.read("svg", o.svg);
  r.read("record_every", o.record_every);
  r.finish();
  require(!o.csv_dir.empty(), "output.csv_dir", "must not be empty");
  require(o.record_every >= 1, "output.record_every", "must be at least 1");
  return o;
}

SizingConfig parse_sizing(const json& j) {
  ObjectReader r(j, "sizing");
  SizingConfig s;
  r.read("R1_hat", s.r1_hat);
  r.read("R2_hat", s.r2_hat);
  r.read("epsilon", s.epsilon);
  r.finish();
  if (s.r1_hat) require(*s.r1_hat > 0.0, "sizing.R1_hat", "must be positive");
  if (s.r2_hat) require(*s.r2_hat >= 0.0, "sizing.R2_hat", "must be non-negative");
  require(s.epsilon > 0.0, "sizing.epsilon", "must be positive");
  return s;
}

json overrides_json(const AlgorithmOverrides& o) {
  json j = json::object();
  if (o.label) j["label"] = *o.label;
  if (o.variant) j["variant"] = *o.variant;
  if (o.alpha) j["alpha"] = *o.alpha;
  if (o.beta) j["beta"] = *o.beta;
  if (o.epsilon) j["epsilon"] = *o.epsilon;
  if (o.tau) j["tau"] = *o.tau;
  if (o.schedule) j["schedule"] = *o.schedule;
  if (o.inner_iterations) j["inner_iterations"] = *o.inner_iterations;
  return j;
}

json algorithm_json(const AlgorithmConfig& a) {
  json j = {{"name", to_string(a.name)}};
  json o = overrides_json(a.overrides);
  if (!o.empty()) j["overrides"] = o;
  return j;
}

json problem_json(const ProblemConfig& p) {
  return {{"n", p.n}, {"s", p.s}, {"m", p.m}, {"mu", p.mu}, {"seed", p.seed}};
}

json graph_json(const GraphConfig& g) {
  json j = {{"family", to_string(g.family)}, {"seed", g.seed}};
  if (g.param) j["param"] = *g.param;
  return j;
}

json sizing_json(const SizingConfig& s) {
  json j = {{"epsilon", s.epsilon}};
  if (s.r1_hat) j["R1_hat"] = *s.r1_hat;
  if (s.r2_hat) j["R2_hat"] = *s.r2_hat;
  return j;
}

}  // namespace

std::string to_string(GraphFamily family) { return kFamilies.name(family); }
std::string to_string(AlgorithmName name) { return kAlgorithms.name(name); }

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  ObjectReader r(j, "");
  ExperimentConfig c;
  c.problem = parse_problem(r.required("problem"));
  c.graph = parse_graph(r.required("graph"));

  const json& algs = r.required("algorithms");
  if (!algs.is_array()) throw ConfigError("algorithms", "expected an array");
  if (algs.empty()) throw ConfigError("algorithms", "at least one algorithm is required");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < algs.size(); ++i) {
    const std::string path = "algorithms[" + std::to_string(i) + "]";
    c.algorithms.push_back(parse_algorithm(algs[i], path));
    if (!labels.insert(c.algorithms.back().label()).second) {
      throw ConfigError(path, "duplicate label '" + c.algorithms.back().label() + "'");
    }
  }
  if (r.has("budget")) c.budget = parse_budget(r.at("budget"));
  if (r.has("output")) c.output = parse_output(r.at("output"));
  if (r.has("sizing")) c.sizing = parse_sizing(r.at("sizing"));
  r.finish();

  if (c.graph.family == GraphFamily::ring) require(c.problem.m >= 3, "problem.m", "ring needs m >= 3");
  if (c.graph.family != GraphFamily::ring) require(c.problem.m >= 2, "problem.m", "graph needs m >= 2");
  if (c.graph.family == GraphFamily::erdos_renyi && c.graph.param) {
    require(*c.graph.param <= 1.0, "graph.param", "edge probability must lie in (0, 1]");
  }
  return c;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  json algs = json::array();
  for (const auto& a : c.algorithms) algs.push_back(algorithm_json(a));
  json j = {
      {"problem", problem_json(c.problem)},
      {"graph", graph_json(c.graph)},
      {"algorithms", algs},
      {"budget",
       {{"max_grad_rounds", c.budget.max_grad_rounds},
        {"max_comm_rounds", c.budget.max_comm_rounds},
        {"target_gap", c.budget.target_gap}}},
      {"output", {{"csv_dir", c.output.csv_dir}, {"svg", c.output.svg}, {"record_every", c.output.record_every}}},
      {"sizing", sizing_json(c.sizing)},
  };
  return j.dump(2) + "\n";
}

std::string canonical_run_description(const ExperimentConfig& c, const AlgorithmConfig& a) {
  json j = {{"problem", problem_json(c.problem)},
            {"graph", graph_json(c.graph)},
            {"algorithm", algorithm_json(a)},
            {"budget",
             {{"max_grad_rounds", c.budget.max_grad_rounds},
              {"max_comm_rounds", c.budget.max_comm_rounds},
              {"target_gap", c.budget.target_gap}}},
            {"sizing", sizing_json(c.sizing)}};
  return j.dump();
}

Graph build_graph(const GraphConfig& g, int agents) {
  switch (g.family) {
    case GraphFamily::erdos_renyi: return gen_erdos_renyi(agents, g.param_or_default(), g.seed);
    case GraphFamily::geometric: return gen_geometric(agents, g.param_or_default(), g.seed);
    case GraphFamily::ring: return gen_ring(agents);
    case GraphFamily::line: return gen_line(agents);
  }
  throw ArgumentError("unknown graph family");
}

}  // namespace extralab
