#pragma once

#include "optvo/counters.hpp"
#include "optvo/kkt.hpp"
#include "optvo/path.hpp"
#include "optvo/problem.hpp"
#include "optvo/tuner.hpp"

#include <optional>
#include <string>
#include <vector>

namespace optvo {

struct SolverConfig {
  double tau = 3.0;
  double delta_theta = 1e-2;
  double mu = 1e-7;
  /// Convergence threshold on the dtheta-scaled optimality-distance estimate.
  double ohat_threshold = 1e-5;
  int max_iter = 20;
  /// Newton-polish x(tau) at the target weights after the loop.
  bool polish = false;

  /// Throws std::invalid_argument naming the first invalid field.
  void validate() const;
};

/// Objective at target weights and the L1 constraint violation of a terminal point.
struct TerminalQuality {
  double objective = 0.0;
  /// log of the objective; finite where `objective` underflows.
  double log_objective = 0.0;
  double violation = 0.0;
};

TerminalQuality objective_and_violation(const ProblemDefinition& problem, const BlockPoint& x_tau);

/// One row of a run: an OP-TVO iteration, or the single result of a baseline.
struct IterationRecord {
  int iteration = 1;
  TerminalQuality quality;
  /// Wall time since the start of the run.
  double elapsed_s = 0.0;
  /// Cumulative factorization count since the start of the run.
  std::int64_t linear_solves = 0;
  std::optional<double> od;
  std::optional<double> ohat;
  std::optional<double> ohat_raw;
};

struct RunReport {
  std::string solver;
  std::string problem;
  /// "converged", "max_iter", "stalled" for OP-TVO; solver-specific otherwise.
  std::string status;
  std::vector<IterationRecord> records;
  BlockPoint terminal;
  CostCounters counters;

  /// OP-TVO only: prediction of every iteration and the log-rate path it used.
  std::vector<Trajectory> trajectories;
  std::vector<ParametricPath> c_paths;
  /// Index into `trajectories` of the reported (converged or best) iteration.
  int selected_iteration = 0;
  std::optional<NewtonResult> polish;
  /// Newton steps taken (naive Newton only).
  int newton_steps = 0;

  bool ok() const { return status == "converged" || status == "completed"; }
};

/// Algorithm: alternate Euler prediction under the current c with the closed-form tuning
/// of c against the prediction's mean velocity, until the scaled estimate drops below the
/// threshold. Iteration 1 is prediction-only under the constant-rate initial path.
RunReport run_optvo(const ProblemDefinition& problem, const SolverConfig& config,
                    const Trajectory* reference = nullptr);

}  // namespace optvo
