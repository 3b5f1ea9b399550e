#pragma once

#include "optvo/counters.hpp"
#include "optvo/problem.hpp"

#include <vector>

namespace optvo {

/// Reciprocal condition estimate below which a factorization is treated as singular.
inline constexpr double kSingularRcond = 1e-12;

/// Per-agent quantities from which the sensitivity matrix is assembled.
///
/// v is stored in the scaled units of AgentDerivatives (true v_m = exp(log_scale) * v).
/// G and D carry no scale: the factor cancels in diag(v)^{-1} (hess f + sum_n v_n hess h_n).
struct AgentLocal {
  Vector v;
  Matrix G;
  Matrix D;
  Matrix Jm;
  double log_scale = 0.0;
};

/// Computes v_m = -J_m^{-1} grad f and G_m through the decomposition
///   b_m hess f + sum_n lambda_n hess h_{m,n} = J_m diag(lambda) G_m,  lambda = b_m v_m.
/// Throws AssumptionViolation for singular J_m, zero entries of v_m, or singular G_m.
AgentLocal agent_local(const ProblemDefinition& problem, int m, const Vector& x_m, double b_m,
                       CostCounters* counters = nullptr);

/// Factored form of Gamma(x): applies Gamma or materializes it.
class GammaOperator {
 public:
  GammaOperator(const ProblemDefinition& problem, const BlockPoint& x, const Vector& b,
                CostCounters* counters = nullptr);

  int agents() const { return agents_; }
  int dimension() const { return dimension_; }

  /// Gamma * c, length N*M.
  Vector apply(const Vector& c) const;
  /// Dense N*M x M matrix; block row m' holds gamma_{m'm} for m = 1..M.
  Matrix dense() const;

  const std::vector<AgentLocal>& locals() const { return locals_; }

 private:
  int agents_;
  int dimension_;
  std::vector<AgentLocal> locals_;
  std::vector<Eigen::PartialPivLU<Matrix>> g_lu_;
  Matrix y_;  // column m: (sum_k D_k)^{-1} D_m 1
};

/// Gamma(x) in R^{NM x M}.
struct GammaMatrix {
  int agents = 0;
  int dimension = 0;
  Matrix dense;

  /// gamma_{m'm}: block row m', column m.
  auto block(int row_agent, int col_agent) const {
    return dense.col(col_agent).segment(static_cast<Eigen::Index>(row_agent) * dimension, dimension);
  }
};

GammaMatrix assemble_gamma(const ProblemDefinition& problem, const BlockPoint& x, const Vector& b,
                           CostCounters* counters = nullptr);

/// Solution velocity Gamma(x) c.
BlockPoint phi_eval(const ProblemDefinition& problem, const BlockPoint& x, const Vector& b,
                    const Vector& c, CostCounters* counters = nullptr);

/// Multiplier lambda = exp(log_scale) * value.
struct Multiplier {
  Vector value;
  double log_scale = 0.0;

  Vector true_value() const { return std::exp(log_scale) * value; }
};

/// lambda^{(m)} = -b_m J_m^{-1} grad_m f.
Multiplier compute_multiplier(const ProblemDefinition& problem, const BlockPoint& x, const Vector& b,
                              int m, CostCounters* counters = nullptr);

/// max_{m,m'} |lambda^(m) - lambda^(m')| / (1 + |lambda^(1)|), all in the units of agent 1.
double multiplier_consistency(const ProblemDefinition& problem, const BlockPoint& x,
                              const Vector& b, CostCounters* counters = nullptr);

struct KKTResidual {
  /// max_m |b_m grad_m f + J_m lambda| / max_m |b_m grad_m f|, lambda from agent 1.
  double stationarity = 0.0;
  /// |sum_m h_m - u|_1
  double feasibility = 0.0;
};

KKTResidual kkt_residual(const ProblemDefinition& problem, const BlockPoint& x, const Vector& b,
                         CostCounters* counters = nullptr);

struct NewtonOptions {
  int max_steps = 50;
  double tol = 1e-10;
  double backtrack = 0.5;
  double min_step = 1.0 / (1 << 20);
};

enum class NewtonStatus { Converged, MaxSteps, LineSearchFailed, SingularSystem, DomainExit };

const char* to_string(NewtonStatus s);

struct NewtonResult {
  BlockPoint x;
  NewtonStatus status = NewtonStatus::MaxSteps;
  int steps = 0;
  KKTResidual residual;
  /// Merit |F|^2 at the start of each step, in that step's units.
  std::vector<double> merit_history;
  /// Merit after each accepted step, in the units of the matching merit_history entry.
  std::vector<double> accepted_merit;

  bool converged() const { return status == NewtonStatus::Converged; }
};

/// Damped Newton on the joint (x, lambda) KKT system at frozen weights b.
/// The per-agent blocks are eliminated through the N x N Schur complement.
NewtonResult newton_correct(const ProblemDefinition& problem, const BlockPoint& x, const Vector& b,
                            const NewtonOptions& options = {}, CostCounters* counters = nullptr);

}  // namespace optvo
