#include "optvo/driver.hpp"
#include "optvo/e1_problem.hpp"
#include "optvo/errors.hpp"
#include "optvo/quadratic_problem.hpp"
#include "optvo/verify.hpp"

#include <gtest/gtest.h>

using namespace optvo;

namespace {

E1Problem e1(int M, double log_rhs = 0.0) {
  E1Params p;
  p.agents = M;
  p.log_rhs = log_rhs;
  return E1Problem(p);
}

std::string validation_message(const SolverConfig& c) {
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(OpTvo, IdenticalEndpointsStayPut) {
  E1Params p;
  p.agents = 6;
  const Vector p0 = Vector::Constant(6, 1.0 / 6);
  const E1Problem prob(p, p0, p0);
  const RunReport r = run_optvo(prob, {});
  EXPECT_EQ(r.status, "converged");
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.records.size(), 2u);
  EXPECT_EQ(*r.records[1].ohat, 0.0);
  EXPECT_EQ(r.terminal.flat(), prob.initial_solution().flat());
  EXPECT_LE(r.records.back().quality.violation, 1e-10);
}

TEST(OpTvo, QuadraticReachesClosedFormOptimum) {
  const auto params = random_quadratic_params(3, 2, 2024);
  const Vector ptau = random_target_weights(3, 2024);
  const QuadraticProblem q(params, Vector::Ones(3), ptau);
  const RunReport r = run_optvo(q, {});
  ASSERT_EQ(r.status, "converged");
  EXPECT_LE(r.selected_iteration + 1, 5);
  EXPECT_LE(verify::rel_error(r.terminal.flat(), q.solve(ptau).flat()), 1e-4);
  // linear constraints are kept exactly by every Euler step
  EXPECT_LE(r.records.back().quality.violation, 1e-12);
}

TEST(OpTvo, PolishLandsOnKKTPoint) {
  const auto params = random_quadratic_params(3, 2, 5);
  const QuadraticProblem q(params, Vector::Ones(3), random_target_weights(3, 5));
  SolverConfig cfg;
  cfg.polish = true;
  const RunReport r = run_optvo(q, cfg);
  ASSERT_TRUE(r.polish.has_value());
  EXPECT_TRUE(r.polish->converged());
  EXPECT_LE(verify::rel_error(r.terminal.flat(), q.solve(q.target_weights()).flat()), 1e-10);
}

TEST(OpTvo, FullScaleConvergesWithinThreeIterations) {
  const E1Problem prob = e1(100);
  const RunReport r = run_optvo(prob, {});
  EXPECT_EQ(r.status, "converged");
  EXPECT_LE(r.selected_iteration + 1, 3);
  EXPECT_LE(r.records[r.selected_iteration].quality.violation, 1e-3);
}

TEST(OpTvo, EstimateNeverIncreasesBeforeStopping) {
  for (int M : {3, 5, 10}) {
    SolverConfig cfg;
    cfg.ohat_threshold = 1e-30;
    cfg.max_iter = 6;
    const RunReport r = run_optvo(e1(M, 0.8 * M), cfg);
    std::vector<double> est;
    for (const IterationRecord& rec : r.records)
      if (rec.ohat) est.push_back(*rec.ohat);
    const std::size_t last = r.status == "stalled" ? est.size() - 1 : est.size();
    for (std::size_t k = 1; k < last; ++k) EXPECT_LE(est[k], est[k - 1]) << "M=" << M << " k=" << k;
    if (r.status == "stalled") {
      EXPECT_GT(est.back(), est[est.size() - 2]);
      EXPECT_EQ(r.selected_iteration, static_cast<int>(r.records.size()) - 2);
    }
  }
}

TEST(OpTvo, BitDeterministic) {
  const E1Problem prob = e1(8, 6.0);
  const RunReport a = run_optvo(prob, {});
  const RunReport b = run_optvo(prob, {});
  ASSERT_EQ(a.records.size(), b.records.size());
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.terminal.flat(), b.terminal.flat());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    EXPECT_EQ(a.records[k].quality.log_objective, b.records[k].quality.log_objective);
    EXPECT_EQ(a.records[k].linear_solves, b.records[k].linear_solves);
    EXPECT_EQ(a.records[k].ohat, b.records[k].ohat);
    EXPECT_EQ(a.c_paths[k].values, b.c_paths[k].values);
  }
}

TEST(OpTvo, CountsSweepAndTuningFactorizations) {
  const int M = 4;
  SolverConfig cfg;
  cfg.delta_theta = 0.1;
  cfg.max_iter = 1;
  const RunReport one = run_optvo(e1(M), cfg);
  const int nodes = 31;
  EXPECT_EQ(one.counters.agent_solves, nodes * (2 * M + 1));
  EXPECT_EQ(one.counters.weight_solves, 0);
  cfg.max_iter = 2;
  cfg.ohat_threshold = 1e-300;
  const RunReport two = run_optvo(e1(M), cfg);
  EXPECT_EQ(two.counters.agent_solves, 2 * nodes * (2 * M + 1));
  EXPECT_EQ(two.counters.weight_solves, nodes + 1);
  EXPECT_EQ(two.records[0].linear_solves, nodes * (2 * M + 1) + nodes + 1);
  EXPECT_EQ(two.records[1].linear_solves, two.counters.total());
}

TEST(OpTvo, RecordsReferenceDistanceWhenGiven) {
  const E1Problem prob = e1(5);
  const RunReport lone = run_optvo(prob, {});
  for (const IterationRecord& rec : lone.records) EXPECT_FALSE(rec.od.has_value());
  const RunReport against = run_optvo(prob, {}, &lone.trajectories.front());
  EXPECT_EQ(*against.records.front().od, 0.0);
}

TEST(SolverConfig, ValidationNamesTheField) {
  SolverConfig c;
  EXPECT_EQ(validation_message(c), "");
  c.tau = -1.0;
  EXPECT_EQ(validation_message(c), "solver.tau must be positive");
  c = {};
  c.delta_theta = 0.0;
  EXPECT_EQ(validation_message(c), "solver.delta_theta must be positive");
  c = {};
  c.delta_theta = 0.7;
  EXPECT_EQ(validation_message(c), "solver.delta_theta must divide solver.tau");
  c = {};
  c.mu = 0.0;
  EXPECT_EQ(validation_message(c), "solver.mu must be positive");
  c = {};
  c.ohat_threshold = -1e-5;
  EXPECT_EQ(validation_message(c), "solver.ohat_threshold must be positive");
  c = {};
  c.max_iter = 0;
  EXPECT_EQ(validation_message(c), "solver.max_iter must be >= 1");
  EXPECT_THROW(run_optvo(e1(3), c), std::invalid_argument);
}

TEST(OpTvo, DomainExitReportsIteration) {
  // a small log budget pushes x_{m,1} of the heavy agents through -1 along the constant-rate path
  const E1Problem prob = e1(100, 2.0);
  try {
    run_optvo(prob, {});
    FAIL() << "expected a sweep failure";
  } catch (const SweepError& e) {
    EXPECT_GE(e.iteration(), 1);
    EXPECT_GE(e.node(), 1);
    EXPECT_LE(e.node(), 300);
  }
}

TEST(OpTvo, RejectsSignChangingWeights) {
  E1Params p;
  p.agents = 2;
  const E1Problem prob(p, Vector::Constant(2, 0.5), Vector{{0.5, -0.5}});
  EXPECT_THROW(run_optvo(prob, {}), HomotopyError);
}
