#pragma once

// Independent reference computations used by the self-test suite and the test programs.
// Nothing here is called by the solvers.

#include "optvo/problem.hpp"
#include "optvo/quadratic_problem.hpp"
#include "optvo/tuner.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace optvo::verify {

/// |a - b| / max(|b|, floor).
double rel_error(const Matrix& a, const Matrix& b, double floor = 1e-300);

/// Relative errors of the analytic derivatives of one agent against central differences.
/// Objective derivatives are checked through log f, which stays finite where f underflows:
///   grad log f = grad f / f,  hess log f = hess f / f - g g^T.
struct DerivativeCheck {
  double grad = 0.0;
  double hess = 0.0;
  double jacobian = 0.0;
  double constraint_hess = 0.0;

  double worst_first() const { return std::max(grad, jacobian); }
  double worst_second() const { return std::max(hess, constraint_hess); }
};

DerivativeCheck check_derivatives(const ProblemDefinition& problem, int m, const Vector& x_m,
                                  double step = 1e-5);

/// Joint KKT solve of a quadratic instance at weights b, assembled as one dense system
///   2 b_m (x_m - q_m) + A_m^T lambda = 0,  sum_m A_m x_m = u.
struct DenseKKT {
  BlockPoint x;
  Vector lambda;
};
DenseKKT dense_quadratic_kkt(const QuadraticParams& params, const Vector& b);

/// Velocity of the KKT path from the differentiated KKT system, solved densely for (x', lambda'):
///   (b_m hess f + sum_n lambda_n hess h_n) x_m' + J_m lambda' = -c_m b_m grad f,
///   sum_m J_m^T x_m' = 0,
/// with lambda taken from agent 1. Only meaningful at KKT points.
BlockPoint differentiated_kkt_velocity(const ProblemDefinition& problem, const BlockPoint& x,
                                       const Vector& b, const Vector& c);

/// The discretized tuning program
///   min 1/2 sum_j w_j (|Gamma_j c_j - m|^2 + mu |c_j|^2)  s.t.  sum_j w_j c_j = psi
/// assembled and solved as a single dense KKT system.
struct TunerQP {
  Matrix c;  // M x (L+1)
  Vector lambda;
};
TunerQP brute_force_tuner_qp(const ThetaGrid& grid, std::span<const Matrix> gammas,
                             const Vector& m_hat, const Vector& psi, double mu);

/// A problem together with an evaluation state.
struct State {
  std::shared_ptr<const ProblemDefinition> problem;
  BlockPoint x;
  Vector b;
};

/// Seeded states spread over E1 (M in {2,5,10}) and quadratic (M in {2,3}, N in {1,2}) instances;
/// points and weights are random, not KKT points.
std::vector<State> random_states(int count, std::uint64_t seed);

/// Seeded KKT points on small instances (quadratic M in {2,3}, N in {1,2}, plus E1 M in {2,3}).
std::vector<State> kkt_states(int count, std::uint64_t seed);

}  // namespace optvo::verify
