#include "optvo/kkt.hpp"

#include "optvo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace optvo {

namespace {

Eigen::PartialPivLU<Matrix> factor(const Matrix& a, CostCounters* counters) {
  count_agent_solve(counters);
  return Eigen::PartialPivLU<Matrix>(a);
}

bool singular(const Eigen::PartialPivLU<Matrix>& lu) {
  const double rc = lu.rcond();
  return !(rc >= kSingularRcond) || !lu.matrixLU().allFinite();
}

Eigen::PartialPivLU<Matrix> factor_jacobian(const Matrix& jac_t, int m, CostCounters* counters) {
  auto lu = factor(jac_t, counters);
  if (singular(lu))
    throw AssumptionViolation(Assumption::InvertibleConstraintJacobian, m,
                              std::string(to_string(Assumption::InvertibleConstraintJacobian)) +
                                  " violated at agent " + std::to_string(m));
  return lu;
}

struct FactoredLocal {
  AgentLocal local;
  Eigen::PartialPivLU<Matrix> g_lu;
};

FactoredLocal factored_local(const ProblemDefinition& problem, int m, const Vector& x_m,
                             double b_m, CostCounters* counters) {
  const AgentDerivatives d = problem.derivatives(m, x_m);
  const auto j_lu = factor_jacobian(d.jac_t, m, counters);

  AgentLocal out;
  out.log_scale = d.log_scale;
  out.Jm = d.jac_t;
  out.v = -j_lu.solve(d.grad);

  const double vmax = out.v.cwiseAbs().maxCoeff();
  const double vmin = out.v.cwiseAbs().minCoeff();
  if (!(vmax > 0.0) || !(vmin > kSingularRcond * vmax) || !out.v.allFinite())
    throw AssumptionViolation(Assumption::NonzeroMultiplier, m,
                              std::string(to_string(Assumption::NonzeroMultiplier)) +
                                  " violated at agent " + std::to_string(m));

  const Vector lambda = b_m * out.v;
  Matrix lagrangian_hess = b_m * d.hess;
  for (std::size_t n = 0; n < d.constraint_hess.size(); ++n)
    lagrangian_hess += lambda(static_cast<Eigen::Index>(n)) * d.constraint_hess[n];
  out.G = (j_lu.solve(lagrangian_hess)).array().colwise() / lambda.array();

  auto g_lu = factor(out.G, counters);
  if (singular(g_lu))
    throw AssumptionViolation(Assumption::InvertibleCurvature, m,
                              std::string(to_string(Assumption::InvertibleCurvature)) +
                                  " violated at agent " + std::to_string(m));
  out.D = out.Jm.transpose() * g_lu.solve(Matrix::Identity(out.G.rows(), out.G.cols()));
  return {std::move(out), std::move(g_lu)};
}

}  // namespace

AgentLocal agent_local(const ProblemDefinition& problem, int m, const Vector& x_m, double b_m,
                       CostCounters* counters) {
  return factored_local(problem, m, x_m, b_m, counters).local;
}

GammaOperator::GammaOperator(const ProblemDefinition& problem, const BlockPoint& x, const Vector& b,
                             CostCounters* counters)
    : agents_(problem.agents()), dimension_(problem.dimension()) {
  if (x.agents() != agents_ || x.dimension() != dimension_ || b.size() != agents_)
    throw std::invalid_argument("GammaOperator: shape mismatch");
  locals_.reserve(agents_);
  g_lu_.reserve(agents_);
  Matrix sum_d = Matrix::Zero(dimension_, dimension_);
  for (int m = 0; m < agents_; ++m) {
    auto f = factored_local(problem, m, x.block(m), b(m), counters);
    sum_d += f.local.D;
    locals_.push_back(std::move(f.local));
    g_lu_.push_back(std::move(f.g_lu));
  }
  const auto s_lu = factor(sum_d, counters);
  if (singular(s_lu))
    throw AssumptionViolation(Assumption::InvertibleAggregate, -1,
                              std::string(to_string(Assumption::InvertibleAggregate)) + " violated");
  y_.resize(dimension_, agents_);
  const Vector ones = Vector::Ones(dimension_);
  for (int m = 0; m < agents_; ++m) y_.col(m) = s_lu.solve(locals_[m].D * ones);
}

Vector GammaOperator::apply(const Vector& c) const {
  if (c.size() != agents_) throw std::invalid_argument("GammaOperator::apply: c must have length M");
  const Vector yc = y_ * c;
  Vector out(static_cast<Eigen::Index>(agents_) * dimension_);
  for (int m = 0; m < agents_; ++m) {
    const Vector r = yc.array() - c(m);
    out.segment(static_cast<Eigen::Index>(m) * dimension_, dimension_) = -g_lu_[m].solve(r);
  }
  return out;
}

Matrix GammaOperator::dense() const {
  Matrix out(static_cast<Eigen::Index>(agents_) * dimension_, agents_);
  for (int row = 0; row < agents_; ++row) {
    Matrix r = y_;
    r.col(row).array() -= 1.0;
    out.middleRows(static_cast<Eigen::Index>(row) * dimension_, dimension_) = -g_lu_[row].solve(r);
  }
  return out;
}

GammaMatrix assemble_gamma(const ProblemDefinition& problem, const BlockPoint& x, const Vector& b,
                           CostCounters* counters) {
  const GammaOperator op(problem, x, b, counters);
  return {op.agents(), op.dimension(), op.dense()};
}

BlockPoint phi_eval(const ProblemDefinition& problem, const BlockPoint& x, const Vector& b,
                    const Vector& c, CostCounters* counters) {
  const GammaOperator op(problem, x, b, counters);
  return BlockPoint(op.agents(), op.dimension(), op.apply(c));
}

Multiplier compute_multiplier(const ProblemDefinition& problem, const BlockPoint& x, const Vector& b,
                              int m, CostCounters* counters) {
  const AgentDerivatives d = problem.derivatives(m, x.block(m));
  const auto lu = factor_jacobian(d.jac_t, m, counters);
  return {-b(m) * lu.solve(d.grad), d.log_scale};
}

double multiplier_consistency(const ProblemDefinition& problem, const BlockPoint& x,
                              const Vector& b, CostCounters* counters) {
  const int M = problem.agents();
  std::vector<Vector> lambdas;
  lambdas.reserve(M);
  double ref = 0.0;
  for (int m = 0; m < M; ++m) {
    Multiplier mu = compute_multiplier(problem, x, b, m, counters);
    if (m == 0) ref = mu.log_scale;
    lambdas.push_back(mu.value * std::exp(mu.log_scale - ref));
  }
  double worst = 0.0;
  for (int m = 0; m < M; ++m)
    for (int k = m + 1; k < M; ++k) worst = std::max(worst, (lambdas[m] - lambdas[k]).norm());
  return worst / (1.0 + lambdas[0].norm());
}

KKTResidual kkt_residual(const ProblemDefinition& problem, const BlockPoint& x, const Vector& b,
                         CostCounters* counters) {
  const int M = problem.agents();
  const Multiplier lambda = compute_multiplier(problem, x, b, 0, counters);
  double worst = 0.0;
  double scale = 0.0;
  for (int m = 0; m < M; ++m) {
    const AgentDerivatives d = problem.derivatives(m, x.block(m));
    const Vector weighted = b(m) * std::exp(d.log_scale - lambda.log_scale) * d.grad;
    worst = std::max(worst, (weighted + d.jac_t * lambda.value).norm());
    scale = std::max(scale, weighted.norm());
  }
  KKTResidual r;
  r.stationarity = scale > 0.0 ? worst / scale : worst;
  r.feasibility = constraint_residual(problem, x).lpNorm<1>();
  return r;
}

const char* to_string(NewtonStatus s) {
  switch (s) {
    case NewtonStatus::Converged:
      return "converged";
    case NewtonStatus::MaxSteps:
      return "max_steps";
    case NewtonStatus::LineSearchFailed:
      return "line_search_failed";
    case NewtonStatus::SingularSystem:
      return "singular_system";
    case NewtonStatus::DomainExit:
      return "domain_exit";
  }
  return "unknown";
}

namespace {

// KKT equations F = [b_m w_m grad_m + J_m lambda ; sum h_m - u], with lambda and the
// stationarity rows measured in units of exp(ref_scale).
struct KKTEquations {
  std::vector<AgentDerivatives> derivs;
  Vector residual;
  double merit = 0.0;
};

KKTEquations evaluate_equations(const ProblemDefinition& problem, const BlockPoint& x,
                                const Vector& b, const Vector& lambda, double ref_scale) {
  const int M = problem.agents();
  const int n = problem.dimension();
  KKTEquations eq;
  eq.derivs.reserve(M);
  eq.residual.resize(static_cast<Eigen::Index>(M) * n + n);
  Vector feas = -problem.rhs();
  for (int m = 0; m < M; ++m) {
    eq.derivs.push_back(problem.derivatives(m, x.block(m)));
    const AgentDerivatives& d = eq.derivs.back();
    const double w = b(m) * std::exp(d.log_scale - ref_scale);
    eq.residual.segment(static_cast<Eigen::Index>(m) * n, n) = w * d.grad + d.jac_t * lambda;
    feas += problem.constraint(m, x.block(m));
  }
  eq.residual.tail(n) = feas;
  eq.merit = eq.residual.squaredNorm();
  return eq;
}

bool converged(const KKTResidual& r, double tol) {
  return r.stationarity <= tol && r.feasibility <= tol;
}

}  // namespace

NewtonResult newton_correct(const ProblemDefinition& problem, const BlockPoint& x, const Vector& b,
                            const NewtonOptions& options, CostCounters* counters) {
  const int M = problem.agents();
  const int n = problem.dimension();
  NewtonResult result;
  result.x = x;
  check_domain(problem, x);

  Multiplier start = compute_multiplier(problem, x, b, 0, counters);
  Vector lambda = start.value;
  double ref_scale = start.log_scale;

  for (int step = 0;; ++step) {
    result.steps = step;
    result.residual = kkt_residual(problem, result.x, b, counters);
    if (converged(result.residual, options.tol)) {
      result.status = NewtonStatus::Converged;
      return result;
    }
    if (step >= options.max_steps) {
      result.status = NewtonStatus::MaxSteps;
      return result;
    }

    // re-anchor the units at agent 1 of the current iterate
    const double new_ref = problem.derivatives(0, result.x.block(0)).log_scale;
    lambda *= std::exp(ref_scale - new_ref);
    ref_scale = new_ref;

    const KKTEquations eq = evaluate_equations(problem, result.x, b, lambda, ref_scale);
    result.merit_history.push_back(eq.merit);

    std::vector<Eigen::PartialPivLU<Matrix>> k_lu;
    k_lu.reserve(M);
    Matrix schur = Matrix::Zero(n, n);
    Vector schur_rhs = eq.residual.tail(n);
    for (int m = 0; m < M; ++m) {
      const AgentDerivatives& d = eq.derivs[m];
      Matrix k = b(m) * std::exp(d.log_scale - ref_scale) * d.hess;
      for (int i = 0; i < n; ++i) k += lambda(i) * d.constraint_hess[i];
      k_lu.push_back(factor(k, counters));
      if (singular(k_lu.back())) {
        result.status = NewtonStatus::SingularSystem;
        return result;
      }
      schur += d.jac_t.transpose() * k_lu.back().solve(d.jac_t);
      schur_rhs -= d.jac_t.transpose() *
                   k_lu.back().solve(Vector(eq.residual.segment(static_cast<Eigen::Index>(m) * n, n)));
    }
    const auto s_lu = factor(schur, counters);
    if (singular(s_lu)) {
      result.status = NewtonStatus::SingularSystem;
      return result;
    }
    const Vector dlambda = s_lu.solve(schur_rhs);
    Vector dx(static_cast<Eigen::Index>(M) * n);
    for (int m = 0; m < M; ++m) {
      const Vector rhs = eq.residual.segment(static_cast<Eigen::Index>(m) * n, n) +
                         eq.derivs[m].jac_t * dlambda;
      dx.segment(static_cast<Eigen::Index>(m) * n, n) = -k_lu[m].solve(rhs);
    }

    double alpha = 1.0;
    bool accepted = false;
    bool domain_exit = false;
    while (alpha >= options.min_step) {
      BlockPoint trial(M, n, result.x.flat() + alpha * dx);
      const Vector trial_lambda = lambda + alpha * dlambda;
      try {
        check_domain(problem, trial);
        const KKTEquations te = evaluate_equations(problem, trial, b, trial_lambda, ref_scale);
        if (std::isfinite(te.merit) && te.merit < (1.0 - 1e-4 * alpha) * eq.merit) {
          result.x = std::move(trial);
          lambda = trial_lambda;
          result.accepted_merit.push_back(te.merit);
          accepted = true;
          break;
        }
      } catch (const DomainError&) {
        domain_exit = true;
      }
      alpha *= options.backtrack;
    }
    if (!accepted) {
      result.status = domain_exit ? NewtonStatus::DomainExit : NewtonStatus::LineSearchFailed;
      return result;
    }
  }
}

}  // namespace optvo
