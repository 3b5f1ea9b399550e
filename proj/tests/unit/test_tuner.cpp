#include "optvo/e1_problem.hpp"
#include "optvo/errors.hpp"
#include "optvo/kkt.hpp"
#include "optvo/path.hpp"
#include "optvo/quadratic_problem.hpp"
#include "optvo/tuner.hpp"
#include "optvo/verify.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace optvo;
using optvo::testing::vec;

namespace {

struct Instance {
  ThetaGrid grid;
  std::vector<Matrix> gammas;
  Vector m_hat;
  Vector psi;
};

Instance random_instance(int M, int N, int L, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Instance in{ThetaGrid::from_steps(3.0, L), {}, Vector(M * N), Vector(M)};
  for (int j = 0; j <= L; ++j) in.gammas.push_back(Matrix::NullaryExpr(M * N, M, [&] { return n01(rng); }));
  in.m_hat = Vector::NullaryExpr(M * N, [&] { return n01(rng); });
  in.psi = Vector::NullaryExpr(M, [&] { return n01(rng); });
  return in;
}

TuneResult run(const Instance& in, double mu, CostCounters* counters = nullptr) {
  return tune<double>(in.grid, in.gammas, in.m_hat, in.psi, mu, counters);
}

// Constant-rate prediction of E1 with its Gamma at every node.
Trajectory e1_sweep(int M, double dt) {
  E1Params p;
  p.agents = M;
  const E1Problem prob(p);
  const ThetaGrid grid(3.0, dt);
  const Vector psi = psi_from_endpoints(prob.initial_weights(), prob.target_weights());
  return euler_predict(prob, grid, init_c(grid, psi), prob.initial_weights(), {true, true});
}

}  // namespace

TEST(Psi, LogRatioOfEndpoints) {
  const Vector psi = psi_from_endpoints(vec({0.5, 0.5}), vec({0.25, 0.75}));
  EXPECT_DOUBLE_EQ(psi(0), std::log(0.5));
  EXPECT_DOUBLE_EQ(psi(1), std::log(1.5));
  const Vector a = power_law_weights(100, 3.0);
  const Vector big = psi_from_endpoints(Vector::Constant(100, 0.01), a);
  EXPECT_NEAR(big(0), std::log(100.0 * a(0)), 1e-14);
  EXPECT_NEAR(big(99), std::log(100.0 * a(99)), 1e-13);
}

TEST(Psi, RejectsSignChangesAndZeros) {
  EXPECT_THROW(psi_from_endpoints(vec({1.0, 1.0}), vec({1.0, -1.0})), HomotopyError);
  EXPECT_THROW(psi_from_endpoints(vec({1.0, 1.0}), vec({0.0, 1.0})), HomotopyError);
  EXPECT_THROW(psi_from_endpoints(vec({1.0}), vec({1.0, 1.0})), std::invalid_argument);
  // both negative is a positive ratio
  EXPECT_NEAR(psi_from_endpoints(vec({-1.0}), vec({-2.0}))(0), std::log(2.0), 1e-15);
}

TEST(InitC, ConstantRateIntegratesToPsi) {
  const ThetaGrid grid(3.0, 0.01);
  const Vector psi = vec({0.3, -1.2, 2.0});
  const ParametricPath c = init_c(grid, psi);
  EXPECT_EQ(c.agents(), 3);
  EXPECT_EQ(c.values.cols(), 301);
  EXPECT_LT(verify::rel_error(integrate(c), psi), 1e-13);
  EXPECT_LT(verify::rel_error(Vector(c.at(120)), Vector(psi / 3.0)), 1e-15);
}

TEST(ReconstructB, ReachesTargetUnderConstantRate) {
  const Vector p0 = Vector::Constant(4, 0.25);
  const Vector ptau = vec({0.6, 0.2, 0.15, 0.05});
  const ThetaGrid grid(3.0, 0.5);
  const Matrix b = reconstruct_b(init_c(grid, psi_from_endpoints(p0, ptau)), p0);
  EXPECT_EQ(b.col(0), p0);
  EXPECT_LT(verify::rel_error(Vector(b.col(6)), ptau), 1e-14);
  // geometric interpolation: b(theta) = p0^(1 - theta/tau) ptau^(theta/tau)
  const Vector mid = (p0.array().log() * 0.5 + ptau.array().log() * 0.5).exp();
  EXPECT_LT(verify::rel_error(Vector(b.col(3)), mid), 1e-14);
}

TEST(ReconstructB, TrapezoidOfLinearRate) {
  const ThetaGrid grid(1.0, 0.25);
  ParametricPath c{grid, Matrix(1, 5)};
  for (int j = 0; j < 5; ++j) c.values(0, j) = grid.theta(j);
  const Matrix b = reconstruct_b(c, vec({2.0}));
  for (int j = 0; j < 5; ++j) EXPECT_NEAR(b(0, j), 2.0 * std::exp(0.5 * grid.theta(j) * grid.theta(j)), 1e-14);
}

TEST(ReconstructB, OverflowAndShapeErrors) {
  const ThetaGrid grid(1.0, 0.5);
  const ParametricPath c{grid, Matrix::Constant(1, 3, 2000.0)};
  EXPECT_THROW(reconstruct_b(c, vec({1.0})), std::overflow_error);
  EXPECT_THROW(reconstruct_b(c, vec({1.0, 1.0})), std::invalid_argument);
}

TEST(Tune, VanishingGammaGivesConstantRate) {
  Instance in = random_instance(3, 2, 6, 1);
  for (Matrix& g : in.gammas) g.setZero();
  const TuneResult r = run(in, 1e-3);
  EXPECT_LT(verify::rel_error(r.path.values, init_c(in.grid, in.psi).values), 1e-13);
}

TEST(Tune, ZeroTargetVelocityStillMeetsEndpoints) {
  Instance in = random_instance(3, 2, 6, 2);
  in.m_hat.setZero();
  const TuneResult r = run(in, 1e-4);
  EXPECT_LT(verify::rel_error(integrate(r.path), in.psi), 1e-12);
  EXPECT_LE(stationarity_residual<double>(r.path, in.gammas, in.m_hat, 1e-4, r.lambda), 1e-10);
}

TEST(Tune, MatchesDenseQuadraticProgram) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Instance in = random_instance(2 + seed % 3, 1 + seed % 2, 4 + seed % 3, seed);
    for (double mu : {1e-7, 1e-3, 1.0}) {
      const TuneResult r = run(in, mu);
      const verify::TunerQP qp = verify::brute_force_tuner_qp(in.grid, in.gammas, in.m_hat, in.psi, mu);
      EXPECT_LT(verify::rel_error(r.path.values, qp.c), 1e-7) << seed << " mu " << mu;
    }
  }
}

TEST(Tune, StationarityAtOptimumAndLinearGrowthAway) {
  const Instance in = random_instance(4, 2, 8, 5);
  const double mu = 1e-2;
  const TuneResult r = run(in, mu);
  const double scale = r.lambda.norm() + in.m_hat.norm();
  EXPECT_LE(stationarity_residual<double>(r.path, in.gammas, in.m_hat, mu, r.lambda), 1e-12 * scale);
  const Matrix dir = Matrix::Ones(4, in.grid.nodes());
  double prev = 0.0;
  for (double eps : {1e-4, 1e-3, 1e-2}) {
    ParametricPath moved = r.path;
    moved.values += eps * dir;
    const double res = stationarity_residual<double>(moved, in.gammas, in.m_hat, mu, r.lambda);
    if (prev > 0.0) EXPECT_NEAR(res / prev, 10.0, 0.01);
    prev = res;
  }
}

TEST(Tune, OptimalAmongFeasiblePaths) {
  const Instance in = random_instance(3, 2, 10, 9);
  const double mu = 1e-3;
  const TuneResult r = run(in, mu);
  const double best = j2_objective<double>(r.path, in.gammas, in.m_hat, mu);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n01;
  for (int k = 0; k < 100; ++k) {
    ParametricPath other = r.path;
    Matrix delta = Matrix::NullaryExpr(3, in.grid.nodes(), [&] { return n01(rng); });
    // remove the trapezoid mean so the endpoint constraint still holds
    ParametricPath d{in.grid, delta};
    delta.colwise() -= integrate(d) / in.grid.tau();
    other.values += 0.1 * delta;
    ASSERT_LT(verify::rel_error(integrate(other), in.psi), 1e-10);
    EXPECT_GE(j2_objective<double>(other, in.gammas, in.m_hat, mu), best);
  }
}

TEST(Tune, EndpointsReachedThroughReconstruction) {
  const Trajectory t = e1_sweep(5, 0.05);
  E1Params p;
  p.agents = 5;
  const E1Problem prob(p);
  const Vector psi = psi_from_endpoints(prob.initial_weights(), prob.target_weights());
  const TuneResult r = tune<double>(t.grid, t.gammas, t.m_hat, psi, 1e-7);
  const Matrix b = reconstruct_b(r.path, prob.initial_weights());
  EXPECT_LE(verify::rel_error(Vector(b.col(t.grid.steps())), prob.target_weights()), 1e-6);
}

TEST(Tune, ShiftOfTargetAlongConstraintNormalsIsInvisible) {
  const auto params = random_quadratic_params(3, 2, 6);
  const QuadraticProblem q(params, Vector::Ones(3), random_target_weights(3, 6));
  const ThetaGrid grid(3.0, 0.1);
  const Vector psi = psi_from_endpoints(q.initial_weights(), q.target_weights());
  const Trajectory t = euler_predict(q, grid, init_c(grid, psi), q.initial_weights(), {true, true});
  // w_m = A_m^T y lies in the left null space of every Gamma_j
  const Vector y = vec({0.7, -1.3});
  Vector w(6);
  for (int m = 0; m < 3; ++m) w.segment(2 * m, 2) = params.matrices[m].transpose() * y;
  const TuneResult a = tune<double>(grid, t.gammas, t.m_hat, psi, 1e-6);
  const TuneResult b = tune<double>(grid, t.gammas, Vector(t.m_hat + w), psi, 1e-6);
  EXPECT_LT(verify::rel_error(b.path.values, a.path.values), 1e-9);
}

TEST(Tune, ContinuousInRegularization) {
  const Trajectory t = e1_sweep(5, 0.05);
  E1Params p;
  p.agents = 5;
  const E1Problem prob(p);
  const Vector psi = psi_from_endpoints(prob.initial_weights(), prob.target_weights());
  const TuneResult a = tune<double>(t.grid, t.gammas, t.m_hat, psi, 1e-7);
  const TuneResult b = tune<double>(t.grid, t.gammas, t.m_hat, psi, 5e-8);
  EXPECT_LT(verify::rel_error(b.path.values, a.path.values), 1e-3);
}

TEST(Tune, CountsOneFactorizationPerNodePlusOne) {
  const Instance in = random_instance(3, 2, 7, 3);
  CostCounters counters;
  run(in, 1e-3, &counters);
  EXPECT_EQ(counters.weight_solves, 8 + 1);
  EXPECT_EQ(counters.agent_solves, 0);
}

TEST(Tune, ExtendedPrecisionAgrees) {
  const Instance in = random_instance(3, 2, 6, 8);
  const TuneResult r = run(in, 1e-5);
  std::vector<MatrixX<long double>> g;
  for (const Matrix& m : in.gammas) g.push_back(m.cast<long double>());
  const auto rl = tune<long double>(in.grid, g, in.m_hat.cast<long double>(),
                                    in.psi.cast<long double>(), 1e-5L);
  EXPECT_LT(verify::rel_error(Matrix(rl.path.values.cast<double>()), r.path.values), 1e-10);
}

TEST(Tune, RejectsBadInput) {
  Instance in = random_instance(2, 2, 4, 1);
  EXPECT_THROW(run(in, 0.0), std::invalid_argument);
  EXPECT_THROW(run(in, -1.0), std::invalid_argument);
  Instance short_in = in;
  short_in.gammas.pop_back();
  EXPECT_THROW(run(short_in, 1e-3), std::invalid_argument);
  Instance bad_shape = in;
  bad_shape.gammas[2] = Matrix::Zero(3, 2);
  EXPECT_THROW(run(bad_shape, 1e-3), std::invalid_argument);
  Instance nan_in = in;
  nan_in.gammas[1](0, 0) = std::nan("");
  EXPECT_THROW(run(nan_in, 1e-3), std::invalid_argument);
}
