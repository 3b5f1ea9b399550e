#include "optvo/problem.hpp"

#include "optvo/errors.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace optvo {

const char* to_string(Assumption a) {
  switch (a) {
    case Assumption::InvertibleConstraintJacobian:
      return "Assumption II (J_m invertible)";
    case Assumption::InvertibleCurvature:
      return "Assumption III (G_m invertible)";
    case Assumption::InvertibleAggregate:
      return "Assumption III (sum_k D_k invertible)";
    case Assumption::NonzeroMultiplier:
      return "Assumption III (diag(v_m) invertible)";
  }
  return "unknown assumption";
}

ProblemDefinition::ProblemDefinition(int agents, int dimension, Vector rhs, Vector p0, Vector ptau)
    : agents_(agents),
      dimension_(dimension),
      rhs_(std::move(rhs)),
      p0_(std::move(p0)),
      ptau_(std::move(ptau)) {
  if (agents_ < 1 || dimension_ < 1)
    throw std::invalid_argument("problem: agents and dimension must be positive");
  if (rhs_.size() != dimension_) throw std::invalid_argument("problem: u must have length N");
  if (p0_.size() != agents_ || ptau_.size() != agents_)
    throw std::invalid_argument("problem: weight endpoints must have length M");
  for (int m = 0; m < agents_; ++m) {
    if (p0_(m) == 0.0 || ptau_(m) == 0.0 || !std::isfinite(p0_(m)) || !std::isfinite(ptau_(m)))
      throw std::invalid_argument("problem: weight endpoints must be finite and nonzero");
  }
}

double ProblemDefinition::log_objective_term(int m, const Vector& x_m) const {
  return std::log(objective_term(m, x_m));
}

double eval_objective(const ProblemDefinition& problem, const BlockPoint& x, const Vector& weights) {
  if (weights.size() != problem.agents() || x.agents() != problem.agents() ||
      x.dimension() != problem.dimension())
    throw std::invalid_argument("eval_objective: shape mismatch");
  double sum = 0.0;
  for (int m = 0; m < problem.agents(); ++m) sum += weights(m) * problem.objective_term(m, x.block(m));
  return sum;
}

double eval_log_objective(const ProblemDefinition& problem, const BlockPoint& x,
                          const Vector& weights) {
  if (weights.size() != problem.agents() || x.agents() != problem.agents() ||
      x.dimension() != problem.dimension())
    throw std::invalid_argument("eval_log_objective: shape mismatch");
  std::vector<double> terms(problem.agents());
  double peak = -std::numeric_limits<double>::infinity();
  for (int m = 0; m < problem.agents(); ++m) {
    if (!(weights(m) > 0.0))
      throw std::invalid_argument("eval_log_objective: weights must be positive");
    terms[m] = std::log(weights(m)) + problem.log_objective_term(m, x.block(m));
    peak = std::max(peak, terms[m]);
  }
  if (!std::isfinite(peak)) return peak;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - peak);
  return peak + std::log(acc);
}

Vector constraint_residual(const ProblemDefinition& problem, const BlockPoint& x) {
  Vector r = -problem.rhs();
  for (int m = 0; m < problem.agents(); ++m) r += problem.constraint(m, x.block(m));
  return r;
}

void check_domain(const ProblemDefinition& problem, const BlockPoint& x) {
  for (int m = 0; m < problem.agents(); ++m) problem.check_domain(m, x.block(m));
}

}  // namespace optvo
