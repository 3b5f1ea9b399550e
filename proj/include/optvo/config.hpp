#pragma once

#include "optvo/baselines.hpp"
#include "optvo/driver.hpp"
#include "optvo/e1_problem.hpp"
#include "optvo/kkt.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace optvo {

/// Invalid or unreadable experiment configuration. `field` is the dotted key path
/// ("solver.delta_theta"); line and column are 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, int line, int column, const std::string& what)
      : std::runtime_error(what), field_(std::move(field)), line_(line), column_(column) {}
  const std::string& field() const { return field_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string field_;
  int line_;
  int column_;
};

struct ProblemConfig {
  /// "e1" or "quadratic".
  std::string name = "e1";
  E1Params e1;
  /// Agent count (e1 default 100, quadratic default 3).
  int agents = 100;
  /// Block dimension; fixed at 2 for e1. The quadratic instance is drawn from the seed.
  int dimension = 2;
  std::optional<Vector> p0;
  std::optional<Vector> ptau;
  /// ptau: initial  (target weights equal to p0)
  bool ptau_equals_p0 = false;
};

struct OutputConfig {
  std::string directory = "optvo_out";
  /// Write wall times; with false the elapsed column reads N/A and reruns are byte-identical.
  bool record_timing = true;
  bool write_trajectories = true;
};

inline const std::vector<std::string>& known_solvers() {
  static const std::vector<std::string> names{"benchmark", "pcm", "optvo", "newton"};
  return names;
}

struct ExperimentConfig {
  ProblemConfig problem;
  SolverConfig solver;
  PCMConfig pcm;
  BenchmarkConfig benchmark;
  NewtonOptions newton;
  OutputConfig output;
  std::uint64_t seed = 1;
  std::vector<std::string> solvers{"benchmark", "pcm", "optvo"};

  bool runs(const std::string& solver) const;
  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

/// Parses YAML text. `source` is used in error messages only.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

/// Builds the configured problem instance.
std::unique_ptr<ProblemDefinition> make_problem(const ExperimentConfig& config);

/// Parses "benchmark,pcm" style lists; throws ConfigError for unknown names.
std::vector<std::string> parse_solver_list(const std::string& list);

}  // namespace optvo
