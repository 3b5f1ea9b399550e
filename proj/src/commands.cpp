#include "optvo/commands.hpp"

#include "optvo/errors.hpp"
#include "optvo/report_io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <sstream>

namespace fs = std::filesystem;

namespace optvo {

ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream* log) {
  config.validate();
  const auto problem = make_problem(config);
  const double tau = config.solver.tau;
  auto say = [&](const std::string& s) {
    if (log) *log << s << '\n';
  };

  ExperimentResult result;
  result.problem_name = problem->name();
  result.p0 = problem->initial_weights();
  const Trajectory* reference = nullptr;
  if (config.runs("benchmark")) {
    say(fmt::format("benchmark: dtheta={} polish={}", config.benchmark.delta_theta,
                    config.benchmark.polish));
    result.benchmark = run_benchmark(*problem, tau, config.benchmark);
    reference = &result.benchmark->trajectory;
    result.reports.push_back(result.benchmark->report);
  }
  if (config.runs("pcm")) {
    say(fmt::format("pcm: dtheta={} corrector_steps={}", config.pcm.delta_theta,
                    config.pcm.corrector_steps));
    result.reports.push_back(run_pcm(*problem, tau, config.pcm, reference));
  }
  if (config.runs("optvo")) {
    say(fmt::format("optvo: dtheta={} mu={} O_th={}", config.solver.delta_theta, config.solver.mu,
                    config.solver.ohat_threshold));
    result.reports.push_back(run_optvo(*problem, config.solver, reference));
    say("optvo: " + result.reports.back().status);
  }
  if (config.runs("newton")) {
    say("newton: direct solve at target weights");
    result.reports.push_back(run_naive_newton(*problem, config.newton, reference));
    say("newton: " + result.reports.back().status);
  }
  return result;
}

void write_artifacts(const ExperimentResult& result, const ExperimentConfig& config,
                     const std::string& directory) {
  fs::create_directories(directory);
  const fs::path dir(directory);
  const bool timing = config.output.record_timing;
  for (const RunReport& r : result.reports)
    write_report_json((dir / ("report_" + r.solver + ".json")).string(), r, timing);
  write_text((dir / "comparison.csv").string(),
             comparison_csv(comparison_rows(result.reports), timing));
  if (!config.output.write_trajectories) return;
  if (result.benchmark) {
    const Trajectory& t = result.benchmark->trajectory;
    write_text((dir / "benchmark_trajectory.csv").string(), trajectory_csv(t.points, t.grid));
  }
  for (const RunReport& r : result.reports) {
    for (std::size_t k = 0; k < r.trajectories.size(); ++k) {
      const Trajectory& t = r.trajectories[k];
      const std::string stem = (dir / fmt::format("{}_iter{}", r.solver, k + 1)).string();
      write_text(stem + "_trajectory.csv", trajectory_csv(t.points, t.grid));
      write_text(stem + "_velocities.csv", velocities_csv(t));
      if (k < r.c_paths.size()) write_text(stem + "_c.csv", c_path_csv(r.c_paths[k], result.p0));
    }
  }
}

std::string resolve_output_directory(const ExperimentConfig& config, const RunOverrides& o) {
  if (o.out) return *o.out;
  if (const char* env = std::getenv("OPTVO_OUT"); env && *env) return env;
  return config.output.directory;
}

int cmd_run(const std::string& config_path, const RunOverrides& overrides, std::ostream& out) {
  ExperimentConfig config = load_config(config_path);
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.solvers) config.solvers = parse_solver_list(*overrides.solvers);
  config.output.directory = resolve_output_directory(config, overrides);

  const ExperimentResult result = run_experiment(config, &out);
  write_artifacts(result, config, config.output.directory);
  out << comparison_csv(comparison_rows(result.reports), config.output.record_timing);
  out << "artifacts: " << config.output.directory << '\n';
  return 0;
}

std::vector<int> parse_index_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || v < 1) throw std::invalid_argument(what + ": bad index '" + item + "'");
    out.push_back(v);
  }
  return out;
}

int cmd_dump_trajectory(const DumpOptions& options, std::ostream& out) {
  const fs::path dir(options.run_directory);
  if (!fs::is_directory(dir))
    throw std::runtime_error("run artifact '" + options.run_directory + "' does not exist");
  std::vector<int> iterations = options.iterations;
  if (iterations.empty())
    for (int k = 1; fs::exists(dir / fmt::format("optvo_iter{}_trajectory.csv", k)); ++k)
      iterations.push_back(k);
  if (iterations.empty())
    throw std::runtime_error("no OP-TVO trajectories in '" + options.run_directory + "'");

  std::string text = "iteration,theta,agent,component,value\n";
  std::size_t rows = 0;
  for (int k : iterations) {
    const fs::path file = dir / fmt::format("optvo_iter{}_trajectory.csv", k);
    if (!fs::exists(file)) throw std::runtime_error("missing artifact '" + file.string() + "'");
    if (options.agents.empty()) continue;
    const Trajectory t = read_trajectory_csv(file.string(), "", "");
    for (int a : options.agents)
      if (a > t.terminal().agents())
        throw std::invalid_argument(fmt::format("agent {} out of range", a));
    if (options.component > t.terminal().dimension())
      throw std::invalid_argument(fmt::format("component {} out of range", options.component));
    const bool full = t.stores_path();
    for (std::size_t j = 0; j < t.points.size(); ++j) {
      const int node = full ? static_cast<int>(j) : (j == 0 ? 0 : t.grid.steps());
      const double theta = t.grid.theta(node);
      for (int a : options.agents)
        for (int i = 1; i <= t.points[j].dimension(); ++i) {
          if (options.component != 0 && i != options.component) continue;
          text += fmt::format("{},{},{},{},{}\n", k, fmt_double(theta), a, i,
                              fmt_double(t.points[j].block(a - 1)(i - 1)));
          ++rows;
        }
    }
  }
  write_text(options.out, text);
  out << fmt::format("wrote {} rows to {}\n", rows, options.out);
  return 0;
}

int cmd_compare(const std::vector<std::string>& reports, const std::string& out_path,
                std::ostream& out) {
  if (reports.empty()) throw std::invalid_argument("compare: no reports given");
  std::vector<RunReport> loaded;
  bool timing = false;
  for (const std::string& path : reports) {
    loaded.push_back(read_report_json(path));
    for (const IterationRecord& r : loaded.back().records)
      if (std::isfinite(r.elapsed_s)) timing = true;
  }
  const std::string table = comparison_csv(comparison_rows(loaded), timing);
  if (!out_path.empty()) write_text(out_path, table);
  out << table;
  return 0;
}

namespace {

void describe(const std::exception& e, nlohmann::json& j) {
  if (const auto* c = dynamic_cast<const ConfigError*>(&e)) {
    j["error"] = "config";
    j["field"] = c->field();
    j["line"] = c->line();
    j["column"] = c->column();
  } else if (const auto* s = dynamic_cast<const SweepError*>(&e)) {
    j["error"] = "sweep";
    j["node"] = s->node();
    if (s->iteration() >= 0) j["iteration"] = s->iteration();
  } else if (const auto* a = dynamic_cast<const AssumptionViolation*>(&e)) {
    j["error"] = "assumption";
    j["assumption"] = to_string(a->which());
    j["agent"] = a->agent();
  } else if (const auto* d = dynamic_cast<const DomainError*>(&e)) {
    j["error"] = "domain";
    j["agent"] = d->agent();
  } else if (dynamic_cast<const HomotopyError*>(&e)) {
    j["error"] = "homotopy";
  } else if (dynamic_cast<const std::invalid_argument*>(&e)) {
    j["error"] = "invalid_argument";
  } else {
    j["error"] = "runtime";
  }
  j["message"] = e.what();
}

void collect_causes(const std::exception& e, nlohmann::json& causes) {
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& inner) {
    nlohmann::json c;
    describe(inner, c);
    causes.push_back(c);
    collect_causes(inner, causes);
  } catch (...) {
    causes.push_back({{"error", "unknown"}});
  }
}

}  // namespace

nlohmann::json error_json(const std::exception& e) {
  nlohmann::json j;
  describe(e, j);
  nlohmann::json causes = nlohmann::json::array();
  collect_causes(e, causes);
  if (!causes.empty()) j["causes"] = causes;
  return j;
}

}  // namespace optvo
