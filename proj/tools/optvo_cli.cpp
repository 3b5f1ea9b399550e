// optvo: run experiments, dump trajectories, merge reports, run the self-test suites.

#include "optvo/commands.hpp"
#include "optvo/selftest.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Weight-homotopy path following: OP-TVO and baselines"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  std::uint64_t seed = 0;
  std::string solvers;
  auto* run = app.add_subcommand("run", "run the configured solvers and write artifacts");
  run->add_option("--config", config_path, "YAML experiment config")->required();
  auto* out_opt = run->add_option("--out", out, "output directory (overrides config and OPTVO_OUT)");
  auto* seed_opt = run->add_option("--seed", seed, "random seed for generated instances");
  auto* solvers_opt =
      run->add_option("--solvers", solvers, "comma-separated subset of benchmark,pcm,optvo,newton");

  optvo::DumpOptions dump;
  std::string agents = "1";
  std::string iterations;
  auto* dump_cmd = app.add_subcommand("dump-trajectory", "long CSV of predicted paths of a run");
  dump_cmd->add_option("--run", dump.run_directory, "artifact directory of a previous run")->required();
  dump_cmd->add_option("--out", dump.out, "output CSV")->required();
  dump_cmd->add_option("--agents", agents, "comma-separated 1-based agents (empty: none)");
  dump_cmd->add_option("--component", dump.component, "1-based component, 0 for all");
  dump_cmd->add_option("--iterations", iterations, "comma-separated iterations (default: all)");

  std::string suite = "fast";
  auto* selftest = app.add_subcommand("selftest", "run the invariant suite");
  selftest->add_option("--suite", suite, "fast, standard or full");

  std::vector<std::string> reports;
  std::string table_out;
  auto* compare = app.add_subcommand("compare", "merge report JSONs into one comparison table");
  compare->add_option("reports", reports, "report JSON files")->required();
  compare->add_option("--out", table_out, "write the table to this CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      optvo::RunOverrides o;
      if (*out_opt) o.out = out;
      if (*seed_opt) o.seed = seed;
      if (*solvers_opt) o.solvers = solvers;
      return optvo::cmd_run(config_path, o, std::cout);
    }
    if (*dump_cmd) {
      dump.agents = optvo::parse_index_list(agents, "--agents");
      dump.iterations = optvo::parse_index_list(iterations, "--iterations");
      return optvo::cmd_dump_trajectory(dump, std::cout);
    }
    if (*selftest) return optvo::cmd_selftest(suite, std::cout);
    if (*compare) return optvo::cmd_compare(reports, table_out, std::cout);
  } catch (const std::exception& e) {
    std::cerr << optvo::error_json(e).dump() << std::endl;
    return 2;
  }
  return 1;
}
