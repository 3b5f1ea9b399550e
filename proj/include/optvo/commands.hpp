#pragma once

#include "optvo/baselines.hpp"
#include "optvo/config.hpp"

#include <json.hpp>

#include <exception>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace optvo {

/// Everything one `run` produces, before it is written to disk.
struct ExperimentResult {
  std::vector<RunReport> reports;  // in table order
  std::optional<BenchmarkResult> benchmark;
  std::string problem_name;
  Vector p0;
};

ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream* log = nullptr);

/// Writes report_<solver>.json, comparison.csv and (optionally) per-iteration
/// optvo_iter<k>_{trajectory,velocities,c}.csv into `directory`.
void write_artifacts(const ExperimentResult& result, const ExperimentConfig& config,
                     const std::string& directory);

struct RunOverrides {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> solvers;
};

/// Resolves the output directory: --out, then $OPTVO_OUT, then the config value.
std::string resolve_output_directory(const ExperimentConfig& config, const RunOverrides& o);

int cmd_run(const std::string& config_path, const RunOverrides& overrides, std::ostream& out);

struct DumpOptions {
  std::string run_directory;
  std::string out;
  /// 1-based agent indices; empty selects none (header-only output).
  std::vector<int> agents;
  /// 1-based component; 0 dumps every component.
  int component = 0;
  /// 1-based iterations; empty dumps every stored iteration.
  std::vector<int> iterations;
};

/// Long CSV: iteration, theta, agent, component, value.
int cmd_dump_trajectory(const DumpOptions& options, std::ostream& out);

/// Merges report JSONs into one comparison table.
int cmd_compare(const std::vector<std::string>& reports, const std::string& out_path,
                std::ostream& out);

/// Machine-readable description of an exception (including nested causes).
nlohmann::json error_json(const std::exception& e);

/// Parses "1,8,15"; an empty string gives an empty list.
std::vector<int> parse_index_list(const std::string& text, const std::string& what);

}  // namespace optvo
