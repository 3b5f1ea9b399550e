#pragma once

#include "optvo/driver.hpp"

namespace optvo {

struct BenchmarkConfig {
  double delta_theta = 1e-4;
  bool polish = true;
  bool store_path = false;

  void validate() const;
};

struct PCMConfig {
  double delta_theta = 1e-4;
  int corrector_steps = 1;
  double corrector_tol = 1e-9;
  bool store_path = false;

  void validate() const;
};

struct BenchmarkResult {
  /// Fine-grid constant-rate sweep; the terminal point is replaced by the polished one.
  Trajectory trajectory;
  BlockPoint unpolished_terminal;
  std::optional<NewtonResult> polish;
  RunReport report;
};

/// Reference path: constant-rate Euler sweep on a fine grid, optionally Newton-polished at tau.
BenchmarkResult run_benchmark(const ProblemDefinition& problem, double tau,
                              const BenchmarkConfig& config = {});

/// Prediction-correction: one Euler step of the tracking ODE under constant rate, then up to
/// `corrector_steps` damped Newton steps on the KKT system at the frozen weights of the
/// next node. Throws SweepError when a corrector diverges.
RunReport run_pcm(const ProblemDefinition& problem, double tau, const PCMConfig& config = {},
                  const Trajectory* reference = nullptr, Trajectory* path_out = nullptr);

/// Newton on P1(tau) from x(0) at target weights. Failure is reported, not thrown.
RunReport run_naive_newton(const ProblemDefinition& problem, const NewtonOptions& options = {},
                           const Trajectory* reference = nullptr);

}  // namespace optvo
