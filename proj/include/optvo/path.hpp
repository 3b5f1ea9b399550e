#pragma once

#include "optvo/counters.hpp"
#include "optvo/problem.hpp"
#include "optvo/tuner.hpp"

#include <functional>
#include <string>
#include <vector>

namespace optvo {

/// Forward-Euler prediction of the solution path on a theta grid.
struct Trajectory {
  ThetaGrid grid;
  std::string problem_name;
  /// x(theta_j), j = 0..L; only {x(0), x(tau)} when the path was not stored.
  std::vector<BlockPoint> points;
  /// Sweep velocities phi(theta_j), j = 0..L-1; empty when the path was not stored.
  std::vector<BlockPoint> velocities;
  /// Gamma(x(theta_j)), j = 0..L, when requested.
  std::vector<Matrix> gammas;
  /// Mean sweep velocity (1/L) sum_j phi(theta_j).
  Vector m_hat;
  /// sum_j |phi(theta_j) - m_hat|^2, accumulated during the sweep.
  double ohat_raw = 0.0;

  bool stores_path() const { return static_cast<int>(points.size()) == grid.nodes(); }
  const BlockPoint& initial() const { return points.front(); }
  const BlockPoint& terminal() const { return points.back(); }
};

struct SweepOptions {
  bool store_path = true;
  /// Keep the dense Gamma at every node (including the terminal one) for tuning.
  bool keep_gammas = false;
};

/// Velocity at node j for the current iterate.
using VelocityField = std::function<Vector(int node, const BlockPoint& x)>;

/// x_{j+1} = x_j + dtheta * velocity(j, x_j). `check` runs on every new point.
/// Exceptions from `velocity` or `check` are rethrown as SweepError carrying the node.
Trajectory euler_sweep(const ThetaGrid& grid, const BlockPoint& x0, const VelocityField& velocity,
                       const SweepOptions& options = {},
                       const std::function<void(const BlockPoint&)>& check = {});

/// Euler prediction under the log-rate path c: velocity Gamma(x_j) c(theta_j) with
/// b(theta_j) reconstructed from c and b0.
Trajectory euler_predict(const ProblemDefinition& problem, const ThetaGrid& grid,
                         const ParametricPath& c, const Vector& b0, const SweepOptions& options = {},
                         CostCounters* counters = nullptr);

/// dtheta * sum_j |phi_j - m_hat|^2 (grid-independent form of the estimate).
double ohat_metric(const Trajectory& traj);
/// sum_j |phi_j - m_hat|^2 as a raw sum.
double ohat_raw(const Trajectory& traj);

/// |x(tau) - x_ref(tau)|. Throws std::invalid_argument for mismatched problems or horizons.
double od_against(const Trajectory& traj, const Trajectory& reference);

/// max_j |x_{j+1} - 2 x_j + x_{j-1}| / dtheta^2 over a stored path.
double max_curvature(const Trajectory& traj);

/// max_j |sum_m h_m(x_j) - u|_1 along a stored path.
double max_feasibility_drift(const ProblemDefinition& problem, const Trajectory& traj);

}  // namespace optvo
