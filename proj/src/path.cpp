#include "optvo/path.hpp"

#include "optvo/errors.hpp"
#include "optvo/kkt.hpp"

#include <exception>
#include <string>

namespace optvo {

namespace {

[[noreturn]] void rethrow_at(int node, const char* stage) {
  try {
    throw;
  } catch (const std::exception& e) {
    std::throw_with_nested(SweepError(
        node, -1, std::string(stage) + " failed at node " + std::to_string(node) + ": " + e.what()));
  }
}

}  // namespace

Trajectory euler_sweep(const ThetaGrid& grid, const BlockPoint& x0, const VelocityField& velocity,
                       const SweepOptions& options,
                       const std::function<void(const BlockPoint&)>& check) {
  Trajectory traj;
  traj.grid = grid;
  const int L = grid.steps();
  const double dt = grid.delta_theta();
  if (options.store_path) {
    traj.points.reserve(L + 1);
    traj.velocities.reserve(L);
  }
  traj.points.push_back(x0);

  // running mean / sum of squared deviations (used when velocities are not kept)
  Vector mean = Vector::Zero(x0.flat().size());
  double m2 = 0.0;

  BlockPoint x = x0;
  for (int j = 0; j < L; ++j) {
    Vector v;
    try {
      v = velocity(j, x);
    } catch (...) {
      rethrow_at(j, "velocity evaluation");
    }
    const Vector delta = v - mean;
    mean += delta / static_cast<double>(j + 1);
    m2 += delta.dot(v - mean);

    BlockPoint next(x.agents(), x.dimension(), x.flat() + dt * v);
    if (check) {
      try {
        check(next);
      } catch (...) {
        rethrow_at(j + 1, "domain check");
      }
    }
    if (options.store_path) {
      traj.velocities.emplace_back(x.agents(), x.dimension(), std::move(v));
      traj.points.push_back(next);
    }
    x = std::move(next);
  }
  if (!options.store_path) traj.points.push_back(x);

  if (options.store_path) {
    Vector sum = Vector::Zero(x0.flat().size());
    for (const BlockPoint& v : traj.velocities) sum += v.flat();
    traj.m_hat = sum / static_cast<double>(L);
    double acc = 0.0;
    for (const BlockPoint& v : traj.velocities) acc += (v.flat() - traj.m_hat).squaredNorm();
    traj.ohat_raw = acc;
  } else {
    traj.m_hat = mean;
    traj.ohat_raw = m2;
  }
  return traj;
}

Trajectory euler_predict(const ProblemDefinition& problem, const ThetaGrid& grid,
                         const ParametricPath& c, const Vector& b0, const SweepOptions& options,
                         CostCounters* counters) {
  if (c.values.cols() != grid.nodes() || c.agents() != problem.agents())
    throw std::invalid_argument("euler_predict: c must be defined on every grid node");
  const Matrix b = reconstruct_b(c, b0);
  const BlockPoint x0 = problem.initial_solution();

  std::vector<Matrix> gammas;
  if (options.keep_gammas) gammas.reserve(grid.nodes());
  const VelocityField field = [&](int j, const BlockPoint& x) -> Vector {
    const GammaOperator op(problem, x, b.col(j), counters);
    if (options.keep_gammas) gammas.push_back(op.dense());
    return op.apply(c.values.col(j));
  };
  const auto in_domain = [&](const BlockPoint& x) { check_domain(problem, x); };

  Trajectory traj = euler_sweep(grid, x0, field, options, in_domain);
  if (options.keep_gammas) {
    try {
      const GammaOperator op(problem, traj.terminal(), b.col(grid.steps()), counters);
      gammas.push_back(op.dense());
    } catch (...) {
      rethrow_at(grid.steps(), "terminal Gamma");
    }
    traj.gammas = std::move(gammas);
  }
  traj.problem_name = problem.name();
  return traj;
}

double ohat_raw(const Trajectory& traj) {
  if (traj.velocities.empty()) return traj.ohat_raw;
  double acc = 0.0;
  for (const BlockPoint& v : traj.velocities) acc += (v.flat() - traj.m_hat).squaredNorm();
  return acc;
}

double ohat_metric(const Trajectory& traj) { return traj.grid.delta_theta() * ohat_raw(traj); }

double od_against(const Trajectory& traj, const Trajectory& reference) {
  if (traj.problem_name != reference.problem_name ||
      !traj.terminal().same_shape(reference.terminal()))
    throw std::invalid_argument("od_against: trajectories belong to different problems");
  if (std::abs(traj.grid.tau() - reference.grid.tau()) > 1e-12 * reference.grid.tau())
    throw std::invalid_argument("od_against: horizons differ");
  return (traj.terminal().flat() - reference.terminal().flat()).norm();
}

double max_curvature(const Trajectory& traj) {
  if (!traj.stores_path()) throw std::invalid_argument("max_curvature: path not stored");
  const double dt2 = traj.grid.delta_theta() * traj.grid.delta_theta();
  double worst = 0.0;
  for (std::size_t j = 1; j + 1 < traj.points.size(); ++j) {
    const Vector second =
        traj.points[j + 1].flat() - 2.0 * traj.points[j].flat() + traj.points[j - 1].flat();
    worst = std::max(worst, second.norm() / dt2);
  }
  return worst;
}

double max_feasibility_drift(const ProblemDefinition& problem, const Trajectory& traj) {
  double worst = 0.0;
  for (const BlockPoint& x : traj.points)
    worst = std::max(worst, constraint_residual(problem, x).lpNorm<1>());
  return worst;
}

}  // namespace optvo
