#pragma once

#include "optvo/problem.hpp"

namespace optvo {

/// Parameters of the erfc-rate allocation problem
///   min sum_m a_m erfc(gamma0 x_{m,1} / sqrt(2^{0.1/x_{m,2}} - 1))
///   s.t. sum_m log(1 + x_{m,1}) = Lconst,  sum_m x_{m,2}^2 = 1.
struct E1Params {
  int agents = 100;
  double gamma0 = 40.0;
  /// Exponent s of the target weights a_m = m^{-s} / sum_k k^{-s}.
  double exponent = 3.0;
  /// Right-hand side of the log constraint; a value <= 0 selects the default (= agents).
  double log_rhs = 0.0;

  double resolved_log_rhs() const { return log_rhs > 0.0 ? log_rhs : static_cast<double>(agents); }
};

/// Lower bound enforced on x_{m,2}.
inline constexpr double kE1DomainEpsilon = 1e-9;

/// Power-law weights m^{-s} / sum_k k^{-s}, m = 1..agents.
Vector power_law_weights(int agents, double exponent);

/// log(erfc(z)), accurate where erfc(z) underflows.
double log_erfc(double z);

class E1Problem final : public ProblemDefinition {
 public:
  /// Uniform p0 = 1/M and power-law target weights.
  explicit E1Problem(const E1Params& params);
  /// Explicit weight endpoints.
  E1Problem(const E1Params& params, Vector p0, Vector ptau);

  std::string name() const override { return "e1"; }
  const E1Params& params() const { return params_; }

  double objective_term(int m, const Vector& x_m) const override;
  double log_objective_term(int m, const Vector& x_m) const override;
  AgentDerivatives derivatives(int m, const Vector& x_m) const override;
  Vector constraint(int m, const Vector& x_m) const override;
  BlockPoint initial_solution() const override;
  void check_domain(int m, const Vector& x_m) const override;

  /// Argument of erfc at x_m.
  double erfc_argument(const Vector& x_m) const;

 private:
  E1Params params_;
};

}  // namespace optvo
