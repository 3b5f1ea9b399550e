#include "optvo/e1_problem.hpp"
#include "optvo/errors.hpp"
#include "optvo/kkt.hpp"
#include "optvo/quadratic_problem.hpp"
#include "optvo/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace optvo;

namespace {

// erfc(z) = e^{-z^2}/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))), evaluated bottom-up.
double log_erfc_continued_fraction(double z) {
  double tail = z;
  for (int k = 400; k >= 1; --k) tail = z + 0.5 * k / tail;
  return -z * z - 0.5 * std::log(std::numbers::pi) - std::log(tail);
}

E1Problem e1(int M, double log_rhs = 0.0, double gamma0 = 40.0) {
  E1Params p;
  p.agents = M;
  p.log_rhs = log_rhs;
  p.gamma0 = gamma0;
  return E1Problem(p);
}

double e1_term_direct(double gamma0, double x1, double x2) {
  return std::erfc(gamma0 * x1 / std::sqrt(std::pow(2.0, 0.1 / x2) - 1.0));
}

}  // namespace

TEST(EvalObjective, QuadraticAtTargetsIsZero) {
  const auto params = random_quadratic_params(4, 3, 9);
  const QuadraticProblem q(params, Vector::Ones(4), random_target_weights(4, 9));
  BlockPoint x(4, 3);
  for (int m = 0; m < 4; ++m) x.block(m) = params.targets[m];
  EXPECT_EQ(eval_objective(q, x, random_target_weights(4, 1)), 0.0);
}

TEST(EvalObjective, E1MatchesScalarLoop) {
  const double gamma0 = 1.0;
  const E1Problem prob = e1(6, 0.0, gamma0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> x1(0.1, 2.0), x2(0.1, 1.0), w(0.1, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    BlockPoint x(6, 2);
    Vector weights(6);
    double expected = 0.0;
    for (int m = 0; m < 6; ++m) {
      x.block(m) << x1(rng), x2(rng);
      weights(m) = w(rng);
      expected += weights(m) * e1_term_direct(gamma0, x.block(m)(0), x.block(m)(1));
    }
    EXPECT_NEAR(eval_objective(prob, x, weights), expected, 1e-14 * expected);
    EXPECT_NEAR(eval_log_objective(prob, x, weights), std::log(expected), 1e-12);
  }
}

TEST(EvalObjective, E1UniformAtInitialPoint) {
  const E1Problem prob = e1(10);
  const BlockPoint x0 = prob.initial_solution();
  const double direct = e1_term_direct(40.0, x0.block(0)(0), x0.block(0)(1));
  // erfc underflows here: the direct sum is 0 while the log form stays exact
  EXPECT_EQ(eval_objective(prob, x0, prob.initial_weights()), 10 * 0.1 * direct);
  const double z = prob.erfc_argument(x0.block(0));
  EXPECT_GT(z, 100.0);
  EXPECT_NEAR(eval_log_objective(prob, x0, prob.initial_weights()),
              log_erfc_continued_fraction(z), 1e-9 * z * z);
}

TEST(EvalObjective, LogErfcAgainstContinuedFraction) {
  for (double z : {3.0, 5.0, 10.0, 25.9, 26.1, 30.0, 68.7, 138.8, 500.0}) {
    const double ref = log_erfc_continued_fraction(z);
    EXPECT_NEAR(log_erfc(z), ref, 1e-13 * std::abs(ref)) << "z = " << z;
  }
  EXPECT_NEAR(log_erfc(0.5), std::log(std::erfc(0.5)), 1e-15);
}

TEST(EvalObjective, DomainViolationsThrow) {
  const E1Problem prob = e1(3);
  BlockPoint x = prob.initial_solution();
  x.block(1)(1) = 0.0;
  EXPECT_THROW(eval_objective(prob, x, prob.initial_weights()), DomainError);
  x = prob.initial_solution();
  x.block(2)(0) = -1.0;
  EXPECT_THROW(eval_objective(prob, x, prob.initial_weights()), DomainError);
  x.block(2)(0) = -1.5;
  EXPECT_THROW(prob.derivatives(2, x.block(2)), DomainError);
  x = prob.initial_solution();
  x.block(0)(1) = -0.2;
  EXPECT_THROW(prob.constraint(0, x.block(0)), DomainError);
  x.block(0)(1) = 0.5 * kE1DomainEpsilon;
  EXPECT_THROW(check_domain(prob, x), DomainError);
  try {
    check_domain(prob, x);
  } catch (const DomainError& e) {
    EXPECT_EQ(e.agent(), 0);
  }
}

TEST(Derivatives, QuadraticClosedForm) {
  const auto params = random_quadratic_params(2, 3, 17);
  const QuadraticProblem q(params, Vector::Ones(2), Vector::Ones(2));
  const Vector x = Vector::LinSpaced(3, -1.0, 2.0);
  const AgentDerivatives d = q.derivatives(1, x);
  EXPECT_EQ(d.log_scale, 0.0);
  EXPECT_TRUE(d.grad.isApprox(2.0 * (x - params.targets[1])));
  EXPECT_TRUE(d.hess.isApprox(2.0 * Matrix::Identity(3, 3)));
  EXPECT_TRUE(d.jac_t.isApprox(params.matrices[1].transpose()));
  for (const Matrix& h : d.constraint_hess) EXPECT_EQ(h.norm(), 0.0);
}

TEST(Derivatives, E1ConstraintJacobianIsDiagonal) {
  const E1Problem prob = e1(4);
  const Vector x{{0.7, 0.3}};
  const AgentDerivatives d = prob.derivatives(0, x);
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 1.0 / 1.7;
  expected(1, 1) = 0.6;
  EXPECT_TRUE(d.jac_t.isApprox(expected, 1e-15));
}

TEST(Derivatives, FiniteDifferencesAtRandomPoints) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> x1(0.05, 3.0), x2(0.05, 1.5), unit(-1.0, 1.0);
  const E1Problem tail = e1(5);
  const E1Problem mild = e1(5, 0.0, 0.5);
  const auto params = random_quadratic_params(3, 4, 8);
  const QuadraticProblem quad(params, Vector::Ones(3), Vector::Ones(3));
  for (int k = 0; k < 25; ++k) {
    const Vector xe{{x1(rng), x2(rng)}};
    for (const ProblemDefinition* p :
         {static_cast<const ProblemDefinition*>(&tail), static_cast<const ProblemDefinition*>(&mild)}) {
      const auto c = verify::check_derivatives(*p, k % 5, xe);
      EXPECT_LE(c.grad, 1e-5) << xe.transpose();
      EXPECT_LE(c.jacobian, 1e-5);
      EXPECT_LE(c.hess, 1e-4) << xe.transpose();
      EXPECT_LE(c.constraint_hess, 1e-4);
    }
    const Vector xq = params.targets[k % 3] + Vector::NullaryExpr(4, [&] { return unit(rng); });
    const auto c = verify::check_derivatives(quad, k % 3, xq);
    EXPECT_LE(c.worst_first(), 1e-5);
    EXPECT_LE(c.worst_second(), 1e-4);
  }
}

TEST(Derivatives, ScaledFormMatchesRawWhereRepresentable) {
  const E1Problem mild = e1(3, 0.0, 0.5);
  const Vector x{{0.4, 0.8}};
  const AgentDerivatives d = mild.derivatives(0, x);
  const double z = mild.erfc_argument(x);
  EXPECT_DOUBLE_EQ(d.log_scale, -z * z);
  // d erfc / d x1 = -2/sqrt(pi) e^{-z^2} dz/dx1
  const double s = 1.0 / std::sqrt(std::pow(2.0, 0.1 / 0.8) - 1.0);
  EXPECT_NEAR(std::exp(d.log_scale) * d.grad(0),
              -2.0 / std::sqrt(std::numbers::pi) * std::exp(-z * z) * 0.5 * s, 1e-14);
}

TEST(InitialSolution, E1PaperScaleSymmetricPoint) {
  const E1Problem prob = e1(100);
  const BlockPoint x0 = prob.initial_solution();
  for (int m = 0; m < 100; ++m) {
    EXPECT_NEAR(x0.block(m)(0), std::numbers::e - 1.0, 1e-12);
    EXPECT_NEAR(x0.block(m)(1), 0.1, 1e-15);
  }
  EXPECT_LT(constraint_residual(prob, x0).norm(), 1e-12);
}

TEST(InitialSolution, E1UnitSphereForAnyAgentCount) {
  for (int M : {2, 3, 7, 10, 64, 100, 1000}) {
    const E1Problem prob = e1(M, 0.37 * M);
    const BlockPoint x0 = prob.initial_solution();
    double sum = 0.0;
    for (int m = 0; m < M; ++m) sum += x0.block(m)(1) * x0.block(m)(1);
    EXPECT_NEAR(sum, 1.0, 4 * M * 1e-16);
  }
}

TEST(InitialSolution, QuadraticSolvesDenseKKT) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto params = random_quadratic_params(3, 2, seed);
    const QuadraticProblem q(params, random_target_weights(3, seed + 5), Vector::Ones(3));
    const auto ref = verify::dense_quadratic_kkt(params, q.initial_weights());
    EXPECT_LT(verify::rel_error(q.initial_solution().flat(), ref.x.flat()), 1e-12);
    EXPECT_LT(kkt_residual(q, q.initial_solution(), q.initial_weights()).stationarity, 1e-10);
  }
}

TEST(InitialSolution, FeasibleAndStationaryForEveryProblem) {
  for (int M : {2, 5, 10, 100}) {
    for (double L : {0.0, 0.5 * M, 5.5}) {
      const E1Problem prob = e1(M, L);
      const BlockPoint x0 = prob.initial_solution();
      EXPECT_LE(constraint_residual(prob, x0).lpNorm<1>(), 1e-10);
      EXPECT_LE(kkt_residual(prob, x0, prob.initial_weights()).stationarity, 1e-8);
    }
  }
  const QuadraticProblem q(random_quadratic_params(5, 3, 1), Vector::Ones(5), Vector::Ones(5));
  EXPECT_LE(constraint_residual(q, q.initial_solution()).lpNorm<1>(), 1e-10);
  EXPECT_LE(kkt_residual(q, q.initial_solution(), q.initial_weights()).stationarity, 1e-8);
}

TEST(ProblemDefinition, RejectsZeroOrMismatchedWeights) {
  E1Params p;
  p.agents = 3;
  EXPECT_THROW(E1Problem(p, Vector::Constant(3, 1.0 / 3), Vector{{0.5, 0.0, 0.5}}),
               std::invalid_argument);
  EXPECT_THROW(E1Problem(p, Vector::Constant(2, 0.5), Vector::Constant(2, 0.5)),
               std::invalid_argument);
  EXPECT_THROW(E1Problem(p, Vector{{0.2, 0.3, 0.5}}, Vector::Constant(3, 1.0 / 3)),
               std::invalid_argument);
  p.agents = 1;
  EXPECT_THROW(E1Problem{p}, std::invalid_argument);
  p.agents = 3;
  p.gamma0 = 0.0;
  EXPECT_THROW(E1Problem{p}, std::invalid_argument);
}

TEST(ProblemDefinition, PowerLawWeights) {
  const Vector a = power_law_weights(100, 3.0);
  EXPECT_NEAR(a.sum(), 1.0, 1e-15);
  double zeta = 0.0;
  for (int m = 1; m <= 100; ++m) zeta += std::pow(m, -3.0);
  EXPECT_NEAR(a(0), 1.0 / zeta, 1e-15);
  EXPECT_NEAR(a(7) / a(0), 1.0 / 512.0, 1e-15);
}
