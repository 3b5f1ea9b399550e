#include "optvo/driver.hpp"

#include "optvo/errors.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <limits>

namespace optvo {

void SolverConfig::validate() const {
  if (!(tau > 0.0)) throw std::invalid_argument("solver.tau must be positive");
  if (!(delta_theta > 0.0)) throw std::invalid_argument("solver.delta_theta must be positive");
  if (!(mu > 0.0)) throw std::invalid_argument("solver.mu must be positive");
  if (!(ohat_threshold > 0.0)) throw std::invalid_argument("solver.ohat_threshold must be positive");
  if (max_iter < 1) throw std::invalid_argument("solver.max_iter must be >= 1");
  try {
    ThetaGrid(tau, delta_theta);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("solver.delta_theta must divide solver.tau");
  }
}

TerminalQuality objective_and_violation(const ProblemDefinition& problem, const BlockPoint& x_tau) {
  TerminalQuality q;
  const Vector& w = problem.target_weights();
  q.objective = eval_objective(problem, x_tau, w);
  q.log_objective = (w.array() > 0.0).all() ? eval_log_objective(problem, x_tau, w)
                                            : std::numeric_limits<double>::quiet_NaN();
  q.violation = constraint_residual(problem, x_tau).lpNorm<1>();
  return q;
}

RunReport run_optvo(const ProblemDefinition& problem, const SolverConfig& config,
                    const Trajectory* reference) {
  config.validate();
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();

  const ThetaGrid grid(config.tau, config.delta_theta);
  const Vector psi = psi_from_endpoints(problem.initial_weights(), problem.target_weights());
  ParametricPath c = init_c(grid, psi);

  RunReport report;
  report.solver = "optvo";
  report.problem = problem.name();
  report.status = "max_iter";

  int best = 0;
  double best_ohat = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= config.max_iter; ++iter) {
    Trajectory traj;
    try {
      traj = euler_predict(problem, grid, c, problem.initial_weights(),
                           {.store_path = true, .keep_gammas = true}, &report.counters);
    } catch (const SweepError& e) {
      std::throw_with_nested(SweepError(e.node(), iter,
                                        "iteration " + std::to_string(iter) + ": " + e.what()));
    }

    IterationRecord rec;
    rec.iteration = iter;
    rec.quality = objective_and_violation(problem, traj.terminal());
    if (reference) rec.od = od_against(traj, *reference);
    if (iter >= 2) {
      rec.ohat_raw = ohat_raw(traj);
      rec.ohat = ohat_metric(traj);
    }

    std::vector<Matrix> gammas = std::move(traj.gammas);
    traj.gammas.clear();
    report.trajectories.push_back(std::move(traj));
    report.c_paths.push_back(c);
    const int idx = iter - 1;

    bool stop = false;
    if (rec.ohat) {
      if (*rec.ohat < config.ohat_threshold) {
        report.status = "converged";
        best = idx;
        stop = true;
      } else if (*rec.ohat > best_ohat) {
        report.status = "stalled";
        stop = true;
      } else {
        best_ohat = *rec.ohat;
        best = idx;
      }
    } else {
      best = idx;
    }

    if (!stop && iter < config.max_iter) {
      const TuneResult tuned =
          tune<double>(grid, gammas, report.trajectories.back().m_hat, psi, config.mu,
                       &report.counters);
      c = tuned.path;
    }
    rec.elapsed_s = std::chrono::duration<double>(clock::now() - start).count();
    rec.linear_solves = report.counters.total();
    report.records.push_back(rec);
    if (stop) break;
  }

  report.selected_iteration = best;
  report.terminal = report.trajectories[best].terminal();
  if (config.polish) {
    report.polish = newton_correct(problem, report.terminal, problem.target_weights(), {},
                                   &report.counters);
    report.terminal = report.polish->x;
  }
  return report;
}

}  // namespace optvo
