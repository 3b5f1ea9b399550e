#pragma once

#include <string>

namespace optvo::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Null-space identities of Gamma on `states` seeded random states. Runtime bound 5 s.
CheckResult check_gamma_invariants(int states = 50, unsigned seed = 11);
/// J_m diag(lambda) G_m against b_m hess f + sum_n lambda_n hess h_n, and G_m under b scaling.
CheckResult check_decomposition(int states = 50, unsigned seed = 11);
/// Gamma c against the differentiated KKT velocity at KKT points.
CheckResult check_sensitivity_equivalence(int states = 24, unsigned seed = 5);
/// tune against the dense discrete QP on L=4, M=2 instances. Runtime bound 1 s.
CheckResult check_tuner_oracle(int instances = 20, unsigned seed = 3);
/// OP-TVO on the quadratic instance against the closed-form optimum. Runtime bound 5 s.
CheckResult check_quadratic_end_to_end();
/// E1 with M=10, Lconst=10: estimate below threshold in <= 5 iterations and a >= 10x
/// improvement of O_d from iteration 1 to convergence. Runtime bound 60 s.
CheckResult check_e1_desk_scale();
/// Convergence part of the desk-scale check only.
CheckResult check_e1_desk_convergence();
/// E1 with M=100: feasibility, objective against the polished benchmark, and cost against PCM
/// at matched terminal-objective tolerance. Runtime bound 10 min.
CheckResult check_e1_full_scale();
/// Terminal quality part of the full-scale check only.
CheckResult check_e1_full_scale_quality();
/// O_d ratio under halving dtheta on E1 with M=5 against a dtheta=1e-5 sweep.
CheckResult check_euler_order();
/// Finite-difference checks of both problems on `points` seeded points each.
CheckResult check_derivative_hygiene(int points = 20, unsigned seed = 2);
/// Polished benchmark endpoint of E1 with M=5 is a KKT point to 1e-10.
CheckResult check_benchmark_polish();

}  // namespace optvo::verify
