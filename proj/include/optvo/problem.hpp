#pragma once

#include "optvo/types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace optvo {

/// First and second derivatives of f and h_m at one agent block.
///
/// The objective derivatives are stored with a common factor pulled out:
///   grad f = exp(log_scale) * grad,   hess f = exp(log_scale) * hess.
/// Problems whose objective lives deep in an exponential tail (E1) would
/// otherwise underflow; every quantity that only needs ratios of gradient
/// and Hessian (v_m, G_m, D_m, Gamma) is exact in the scaled form.
struct AgentDerivatives {
  double log_scale = 0.0;
  Vector grad;
  Matrix hess;
  /// Transpose of the Jacobian of h_m: column n is grad h_{m,n}.
  Matrix jac_t;
  /// constraint_hess[n] = hessian of h_{m,n}.
  std::vector<Matrix> constraint_hess;
};

/// A block-separable program
///   min sum_m a_m f(x_m)  s.t.  sum_m h_m(x_m) = u
/// together with the weight endpoints p0 (solved) and ptau (target).
class ProblemDefinition {
 public:
  virtual ~ProblemDefinition() = default;

  virtual std::string name() const = 0;

  int agents() const { return agents_; }
  int dimension() const { return dimension_; }
  const Vector& rhs() const { return rhs_; }
  const Vector& initial_weights() const { return p0_; }
  const Vector& target_weights() const { return ptau_; }

  /// f(x_m). Throws DomainError outside the domain.
  virtual double objective_term(int m, const Vector& x_m) const = 0;
  /// log f(x_m); the default takes the log of objective_term.
  virtual double log_objective_term(int m, const Vector& x_m) const;
  virtual AgentDerivatives derivatives(int m, const Vector& x_m) const = 0;
  virtual Vector constraint(int m, const Vector& x_m) const = 0;
  /// Known optimum of the program at weights p0.
  virtual BlockPoint initial_solution() const = 0;
  /// Throws DomainError when x_m is outside the evaluators' domain.
  virtual void check_domain(int m, const Vector& x_m) const = 0;

 protected:
  ProblemDefinition(int agents, int dimension, Vector rhs, Vector p0, Vector ptau);

 private:
  int agents_;
  int dimension_;
  Vector rhs_;
  Vector p0_;
  Vector ptau_;
};

using ProblemPtr = std::shared_ptr<const ProblemDefinition>;

/// sum_m weights_m f(x_m), summed directly (may underflow to 0 for tail problems).
double eval_objective(const ProblemDefinition& problem, const BlockPoint& x, const Vector& weights);

/// log of sum_m weights_m f(x_m) by log-sum-exp; requires positive weights.
double eval_log_objective(const ProblemDefinition& problem, const BlockPoint& x,
                          const Vector& weights);

/// sum_m h_m(x_m) - u.
Vector constraint_residual(const ProblemDefinition& problem, const BlockPoint& x);

/// Throws DomainError for the first agent block outside the domain.
void check_domain(const ProblemDefinition& problem, const BlockPoint& x);

}  // namespace optvo
