#pragma once

#include "optvo/problem.hpp"

#include <cstdint>

namespace optvo {

/// f(x) = |x - q_m|^2 per agent with linear constraints h_m(x) = A_m x.
/// The target q_m is agent-specific, so f carries the agent index.
struct QuadraticParams {
  std::vector<Vector> targets;   // q_m
  std::vector<Matrix> matrices;  // A_m, invertible
  Vector rhs;                    // u
};

/// Seeded instance with A_m near the identity and a multiplier bounded away from zero
/// along the whole geometric weight homotopy.
QuadraticParams random_quadratic_params(int agents, int dimension, std::uint64_t seed);

/// Seeded positive target weights in [0.25, 4].
Vector random_target_weights(int agents, std::uint64_t seed);

class QuadraticProblem final : public ProblemDefinition {
 public:
  QuadraticProblem(QuadraticParams params, Vector p0, Vector ptau);

  std::string name() const override { return "quadratic"; }
  const QuadraticParams& params() const { return params_; }

  double objective_term(int m, const Vector& x_m) const override;
  AgentDerivatives derivatives(int m, const Vector& x_m) const override;
  Vector constraint(int m, const Vector& x_m) const override;
  BlockPoint initial_solution() const override;
  void check_domain(int, const Vector&) const override {}

  /// Closed-form minimizer at arbitrary positive weights, with its multiplier.
  BlockPoint solve(const Vector& weights, Vector* multiplier = nullptr) const;

 private:
  QuadraticParams params_;
};

}  // namespace optvo
