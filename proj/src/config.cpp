#include "optvo/config.hpp"

#include "optvo/quadratic_problem.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace optvo {

namespace {

struct Location {
  int line = 0;
  int column = 0;
};

Location location_of(const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  if (mark.is_null()) return {};
  return {mark.line + 1, mark.column + 1};
}

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& field, const YAML::Node& node,
                         const std::string& what) const {
    const Location loc = location_of(node);
    throw ConfigError(field, loc.line, loc.column,
                      source_ + ":" + std::to_string(loc.line) + ":" + std::to_string(loc.column) +
                          ": " + field + ": " + what);
  }

  /// Rejects keys of `node` outside `allowed`.
  void expect_keys(const YAML::Node& node, const std::string& path,
                   const std::set<std::string>& allowed) const {
    if (!node.IsMap()) fail(path, node, "expected a mapping");
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      if (!allowed.count(key))
        fail(path.empty() ? key : path + "." + key, kv.first, "unknown key");
    }
  }

  template <typename T>
  void read(const YAML::Node& parent, const std::string& path, const std::string& key,
            T& out) {
    const YAML::Node node = parent[key];
    if (!node) return;
    const std::string field = path.empty() ? key : path + "." + key;
    locations_[field] = location_of(node);
    if (!node.IsScalar()) fail(field, node, "expected a scalar value");
    try {
      out = node.as<T>();
    } catch (const YAML::Exception&) {
      fail(field, node, "cannot convert '" + node.Scalar() + "'");
    }
  }

  Vector read_vector(const YAML::Node& node, const std::string& field) {
    locations_[field] = location_of(node);
    if (!node.IsSequence() || node.size() == 0) fail(field, node, "expected a non-empty list");
    Vector v(static_cast<Eigen::Index>(node.size()));
    for (std::size_t i = 0; i < node.size(); ++i) {
      try {
        v(static_cast<Eigen::Index>(i)) = node[i].as<double>();
      } catch (const YAML::Exception&) {
        fail(field, node[i], "entry is not a number");
      }
    }
    return v;
  }

  Location where(const std::string& field) const {
    auto it = locations_.find(field);
    return it == locations_.end() ? Location{} : it->second;
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::map<std::string, Location> locations_;
};

void read_problem(Reader& r, const YAML::Node& node, ProblemConfig& p) {
  r.expect_keys(node, "problem",
                {"name", "agents", "dimension", "gamma0", "exponent", "log_rhs", "p0", "ptau"});
  r.read(node, "problem", "name", p.name);
  if (p.name != "e1" && p.name != "quadratic")
    r.fail("problem.name", node["name"], "expected 'e1' or 'quadratic'");
  if (p.name == "quadratic") p.agents = 3;
  r.read(node, "problem", "agents", p.agents);
  p.e1.agents = p.agents;
  r.read(node, "problem", "dimension", p.dimension);
  if (p.name == "e1") {
    if (node["dimension"] && p.dimension != 2)
      r.fail("problem.dimension", node["dimension"], "e1 has dimension 2");
    p.dimension = 2;
    r.read(node, "problem", "gamma0", p.e1.gamma0);
    r.read(node, "problem", "exponent", p.e1.exponent);
    r.read(node, "problem", "log_rhs", p.e1.log_rhs);
  } else {
    for (const char* key : {"gamma0", "exponent", "log_rhs"})
      if (node[key]) r.fail(std::string("problem.") + key, node[key], "only valid for e1");
  }
  if (node["p0"]) p.p0 = r.read_vector(node["p0"], "problem.p0");
  if (const YAML::Node t = node["ptau"]) {
    if (t.IsScalar() && t.Scalar() == "initial") {
      p.ptau_equals_p0 = true;
    } else {
      p.ptau = r.read_vector(t, "problem.ptau");
    }
  }
}

void read_solver(Reader& r, const YAML::Node& node, SolverConfig& s) {
  r.expect_keys(node, "solver",
                {"tau", "delta_theta", "mu", "ohat_threshold", "max_iter", "polish"});
  r.read(node, "solver", "tau", s.tau);
  r.read(node, "solver", "delta_theta", s.delta_theta);
  r.read(node, "solver", "mu", s.mu);
  r.read(node, "solver", "ohat_threshold", s.ohat_threshold);
  r.read(node, "solver", "max_iter", s.max_iter);
  r.read(node, "solver", "polish", s.polish);
}

void read_pcm(Reader& r, const YAML::Node& node, PCMConfig& p) {
  r.expect_keys(node, "pcm", {"delta_theta", "corrector_steps", "corrector_tol"});
  r.read(node, "pcm", "delta_theta", p.delta_theta);
  r.read(node, "pcm", "corrector_steps", p.corrector_steps);
  r.read(node, "pcm", "corrector_tol", p.corrector_tol);
}

void read_benchmark(Reader& r, const YAML::Node& node, BenchmarkConfig& b) {
  r.expect_keys(node, "benchmark", {"delta_theta", "polish"});
  r.read(node, "benchmark", "delta_theta", b.delta_theta);
  r.read(node, "benchmark", "polish", b.polish);
}

void read_newton(Reader& r, const YAML::Node& node, NewtonOptions& n) {
  r.expect_keys(node, "newton", {"max_steps", "tol"});
  r.read(node, "newton", "max_steps", n.max_steps);
  r.read(node, "newton", "tol", n.tol);
}

void read_output(Reader& r, const YAML::Node& node, OutputConfig& o) {
  r.expect_keys(node, "output", {"directory", "record_timing", "write_trajectories"});
  r.read(node, "output", "directory", o.directory);
  r.read(node, "output", "record_timing", o.record_timing);
  r.read(node, "output", "write_trajectories", o.write_trajectories);
}

// Leading "section.key" of a validation message.
std::string field_of(const std::string& message) {
  const auto end = message.find(' ');
  return message.substr(0, end);
}

}  // namespace

bool ExperimentConfig::runs(const std::string& solver) const {
  return std::find(solvers.begin(), solvers.end(), solver) != solvers.end();
}

void ExperimentConfig::validate() const {
  auto check = [](auto&& fn) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(field_of(e.what()), 0, 0, e.what());
    }
  };
  check([&] { solver.validate(); });
  check([&] { pcm.validate(); });
  check([&] { benchmark.validate(); });
  for (auto [field, step] : {std::pair{"pcm.delta_theta", pcm.delta_theta},
                             std::pair{"benchmark.delta_theta", benchmark.delta_theta}}) {
    try {
      ThetaGrid(solver.tau, step);
    } catch (const std::invalid_argument&) {
      throw ConfigError(field, 0, 0, std::string(field) + " must divide solver.tau");
    }
  }
  if (newton.max_steps < 0)
    throw ConfigError("newton.max_steps", 0, 0, "newton.max_steps must be >= 0");
  if (!(newton.tol > 0.0)) throw ConfigError("newton.tol", 0, 0, "newton.tol must be positive");
  if (problem.agents < (problem.name == "e1" ? 2 : 1))
    throw ConfigError("problem.agents", 0, 0, "problem.agents is too small");
  if (problem.dimension < 1)
    throw ConfigError("problem.dimension", 0, 0, "problem.dimension must be >= 1");
  if (problem.name == "e1") {
    if (!(problem.e1.gamma0 > 0.0))
      throw ConfigError("problem.gamma0", 0, 0, "problem.gamma0 must be positive");
    if (problem.e1.log_rhs < 0.0)
      throw ConfigError("problem.log_rhs", 0, 0, "problem.log_rhs must be positive (0 = default)");
  }
  for (const auto* w : {&problem.p0, &problem.ptau})
    if (*w && (*w)->size() != problem.agents)
      throw ConfigError(w == &problem.p0 ? "problem.p0" : "problem.ptau", 0, 0,
                        "weight list length must equal problem.agents");
  for (const std::string& s : solvers)
    if (std::find(known_solvers().begin(), known_solvers().end(), s) == known_solvers().end())
      throw ConfigError("solvers", 0, 0, "unknown solver '" + s + "'");
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("", e.mark.line + 1, e.mark.column + 1,
                      source + ":" + std::to_string(e.mark.line + 1) + ":" +
                          std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  ExperimentConfig cfg;
  if (root.IsNull()) return cfg;
  Reader r(source);
  r.expect_keys(root, "",
                {"problem", "solver", "pcm", "benchmark", "newton", "output", "seed", "solvers"});
  if (root["problem"]) read_problem(r, root["problem"], cfg.problem);
  if (root["solver"]) read_solver(r, root["solver"], cfg.solver);
  if (root["pcm"]) read_pcm(r, root["pcm"], cfg.pcm);
  if (root["benchmark"]) read_benchmark(r, root["benchmark"], cfg.benchmark);
  if (root["newton"]) read_newton(r, root["newton"], cfg.newton);
  if (root["output"]) read_output(r, root["output"], cfg.output);
  r.read(root, "", "seed", cfg.seed);
  if (const YAML::Node s = root["solvers"]) {
    if (!s.IsSequence()) r.fail("solvers", s, "expected a list");
    cfg.solvers.clear();
    for (const auto& item : s) {
      const std::string name = item.as<std::string>();
      if (std::find(known_solvers().begin(), known_solvers().end(), name) == known_solvers().end())
        r.fail("solvers", item, "unknown solver '" + name + "'");
      cfg.solvers.push_back(name);
    }
  }

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    const Location loc = r.where(e.field());
    throw ConfigError(e.field(), loc.line, loc.column,
                      source + ":" + std::to_string(loc.line) + ":" + std::to_string(loc.column) +
                          ": " + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, 0, "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::unique_ptr<ProblemDefinition> make_problem(const ExperimentConfig& config) {
  const ProblemConfig& p = config.problem;
  if (p.name == "e1") {
    E1Params params = p.e1;
    params.agents = p.agents;
    if (!p.p0 && !p.ptau && !p.ptau_equals_p0) return std::make_unique<E1Problem>(params);
    const Vector p0 = p.p0 ? *p.p0 : Vector::Constant(p.agents, 1.0 / p.agents);
    const Vector ptau = p.ptau_equals_p0 ? p0
                        : p.ptau         ? *p.ptau
                                         : power_law_weights(p.agents, params.exponent);
    return std::make_unique<E1Problem>(params, p0, ptau);
  }
  QuadraticParams params = random_quadratic_params(p.agents, p.dimension, config.seed);
  const Vector p0 = p.p0 ? *p.p0 : Vector::Ones(p.agents);
  const Vector ptau = p.ptau_equals_p0 ? p0
                      : p.ptau         ? *p.ptau
                                       : random_target_weights(p.agents, config.seed);
  return std::make_unique<QuadraticProblem>(std::move(params), p0, ptau);
}

std::vector<std::string> parse_solver_list(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    if (std::find(known_solvers().begin(), known_solvers().end(), item) == known_solvers().end())
      throw ConfigError("solvers", 0, 0, "unknown solver '" + item + "'");
    out.push_back(item);
  }
  return out;
}

}  // namespace optvo
