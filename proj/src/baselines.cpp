#include "optvo/baselines.hpp"

#include "optvo/errors.hpp"

#include <chrono>
#include <exception>
#include <string>

namespace optvo {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

}  // namespace

void BenchmarkConfig::validate() const {
  if (!(delta_theta > 0.0)) throw std::invalid_argument("benchmark.delta_theta must be positive");
}

void PCMConfig::validate() const {
  if (!(delta_theta > 0.0)) throw std::invalid_argument("pcm.delta_theta must be positive");
  if (corrector_steps < 0) throw std::invalid_argument("pcm.corrector_steps must be >= 0");
  if (!(corrector_tol > 0.0)) throw std::invalid_argument("pcm.corrector_tol must be positive");
}

BenchmarkResult run_benchmark(const ProblemDefinition& problem, double tau,
                              const BenchmarkConfig& config) {
  config.validate();
  const auto start = clock_type::now();
  const ThetaGrid grid(tau, config.delta_theta);
  const Vector psi = psi_from_endpoints(problem.initial_weights(), problem.target_weights());
  const ParametricPath c = init_c(grid, psi);

  BenchmarkResult out;
  out.report.solver = "benchmark";
  out.report.problem = problem.name();
  out.trajectory = euler_predict(problem, grid, c, problem.initial_weights(),
                                 {.store_path = config.store_path, .keep_gammas = false},
                                 &out.report.counters);
  out.unpolished_terminal = out.trajectory.terminal();
  out.report.status = "completed";
  if (config.polish) {
    out.polish = newton_correct(problem, out.unpolished_terminal, problem.target_weights(), {},
                                &out.report.counters);
    out.trajectory.points.back() = out.polish->x;
    if (!out.polish->converged()) out.report.status = std::string("polish_") + to_string(out.polish->status);
  }
  out.report.terminal = out.trajectory.terminal();

  IterationRecord rec;
  rec.quality = objective_and_violation(problem, out.report.terminal);
  rec.od = 0.0;
  rec.elapsed_s = seconds_since(start);
  rec.linear_solves = out.report.counters.total();
  out.report.records.push_back(rec);
  return out;
}

RunReport run_pcm(const ProblemDefinition& problem, double tau, const PCMConfig& config,
                  const Trajectory* reference, Trajectory* path_out) {
  config.validate();
  const auto start = clock_type::now();
  const ThetaGrid grid(tau, config.delta_theta);
  const Vector psi = psi_from_endpoints(problem.initial_weights(), problem.target_weights());
  const ParametricPath c = init_c(grid, psi);
  const Matrix b = reconstruct_b(c, problem.initial_weights());

  RunReport report;
  report.solver = "pcm";
  report.problem = problem.name();

  Trajectory traj;
  traj.grid = grid;
  traj.problem_name = problem.name();
  BlockPoint x = problem.initial_solution();
  traj.points.push_back(x);
  const NewtonOptions corrector{.max_steps = config.corrector_steps, .tol = config.corrector_tol};

  for (int j = 0; j < grid.steps(); ++j) {
    try {
      const GammaOperator op(problem, x, b.col(j), &report.counters);
      BlockPoint next(x.agents(), x.dimension(),
                      x.flat() + grid.delta_theta() * op.apply(c.values.col(j)));
      check_domain(problem, next);
      if (config.corrector_steps > 0) {
        NewtonResult nr = newton_correct(problem, next, b.col(j + 1), corrector, &report.counters);
        if (nr.status != NewtonStatus::Converged && nr.status != NewtonStatus::MaxSteps)
          throw std::runtime_error(std::string("corrector ") + to_string(nr.status));
        next = std::move(nr.x);
      }
      x = std::move(next);
    } catch (const std::exception& e) {
      std::throw_with_nested(SweepError(
          j + 1, -1, "pcm failed at node " + std::to_string(j + 1) + ": " + e.what()));
    }
    if (config.store_path) traj.points.push_back(x);
  }
  if (!config.store_path) traj.points.push_back(x);

  report.status = "completed";
  report.terminal = x;
  IterationRecord rec;
  rec.quality = objective_and_violation(problem, x);
  if (reference) rec.od = od_against(traj, *reference);
  rec.elapsed_s = seconds_since(start);
  rec.linear_solves = report.counters.total();
  report.records.push_back(rec);
  if (path_out) *path_out = std::move(traj);
  return report;
}

RunReport run_naive_newton(const ProblemDefinition& problem, const NewtonOptions& options,
                           const Trajectory* reference) {
  const auto start = clock_type::now();
  RunReport report;
  report.solver = "newton";
  report.problem = problem.name();
  const NewtonResult nr = newton_correct(problem, problem.initial_solution(),
                                         problem.target_weights(), options, &report.counters);
  report.status = nr.converged() ? "converged" : to_string(nr.status);
  report.newton_steps = nr.steps;
  report.terminal = nr.x;
  IterationRecord rec;
  rec.iteration = nr.steps;
  rec.quality = objective_and_violation(problem, nr.x);
  if (reference) {
    const double tau = reference->grid.tau();
    Trajectory single;
    single.grid = ThetaGrid::from_steps(tau, 1);
    single.problem_name = problem.name();
    single.points = {problem.initial_solution(), nr.x};
    rec.od = od_against(single, *reference);
  }
  rec.elapsed_s = seconds_since(start);
  rec.linear_solves = report.counters.total();
  report.records.push_back(rec);
  report.polish = nr;
  return report;
}

}  // namespace optvo
