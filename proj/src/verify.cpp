#include "optvo/verify.hpp"

#include "optvo/e1_problem.hpp"
#include "optvo/kkt.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace optvo::verify {

double rel_error(const Matrix& a, const Matrix& b, double floor) {
  return (a - b).norm() / std::max(b.norm(), floor);
}

namespace {

Vector log_gradient(const ProblemDefinition& problem, int m, const Vector& x_m) {
  const AgentDerivatives d = problem.derivatives(m, x_m);
  const double log_f = problem.log_objective_term(m, x_m);
  return std::exp(d.log_scale - log_f) * d.grad;
}

double step_for(double x, double step) { return step * std::max(1.0, std::abs(x)); }

}  // namespace

DerivativeCheck check_derivatives(const ProblemDefinition& problem, int m, const Vector& x_m,
                                  double step) {
  const int n = static_cast<int>(x_m.size());
  const AgentDerivatives d = problem.derivatives(m, x_m);
  const double log_f = problem.log_objective_term(m, x_m);
  const double ratio = std::exp(d.log_scale - log_f);
  const Vector g = ratio * d.grad;
  const Matrix h = ratio * d.hess - g * g.transpose();

  Vector g_fd(n);
  Matrix h_fd(n, n);
  Matrix j_fd(n, n);
  std::vector<Matrix> hh_fd(n, Matrix(n, n));
  for (int i = 0; i < n; ++i) {
    const double hi = step_for(x_m(i), step);
    Vector xp = x_m, xm = x_m;
    xp(i) += hi;
    xm(i) -= hi;
    g_fd(i) = (problem.log_objective_term(m, xp) - problem.log_objective_term(m, xm)) / (2 * hi);
    h_fd.col(i) = (log_gradient(problem, m, xp) - log_gradient(problem, m, xm)) / (2 * hi);
    // column i of the Jacobian of h is d h / d x_i; jac_t holds its transpose
    j_fd.row(i) = ((problem.constraint(m, xp) - problem.constraint(m, xm)) / (2 * hi)).transpose();
    const AgentDerivatives dp = problem.derivatives(m, xp);
    const AgentDerivatives dm = problem.derivatives(m, xm);
    for (int k = 0; k < n; ++k) hh_fd[k].col(i) = (dp.jac_t.col(k) - dm.jac_t.col(k)) / (2 * hi);
  }

  DerivativeCheck out;
  out.grad = rel_error(g, g_fd);
  out.hess = rel_error(h, h_fd);
  out.jacobian = rel_error(d.jac_t, j_fd);
  for (int k = 0; k < n; ++k) {
    const double scale = std::max(hh_fd[k].norm(), d.jac_t.norm());
    out.constraint_hess =
        std::max(out.constraint_hess, (d.constraint_hess[k] - hh_fd[k]).norm() / scale);
  }

  // Raw-form check where f itself is representable.
  const double f = problem.objective_term(m, x_m);
  if (f > 1e-200) {
    const double scale = std::exp(d.log_scale);
    Vector gr_fd(n);
    Matrix hr_fd(n, n);
    for (int i = 0; i < n; ++i) {
      const double hi = step_for(x_m(i), step);
      Vector xp = x_m, xm = x_m;
      xp(i) += hi;
      xm(i) -= hi;
      gr_fd(i) = (problem.objective_term(m, xp) - problem.objective_term(m, xm)) / (2 * hi);
      const AgentDerivatives dp = problem.derivatives(m, xp);
      const AgentDerivatives dm = problem.derivatives(m, xm);
      hr_fd.col(i) = (std::exp(dp.log_scale) * dp.grad - std::exp(dm.log_scale) * dm.grad) / (2 * hi);
    }
    out.grad = std::max(out.grad, rel_error(scale * d.grad, gr_fd, 1e-12));
    out.hess = std::max(out.hess, rel_error(scale * d.hess, hr_fd, 1e-12));
  }
  return out;
}

DenseKKT dense_quadratic_kkt(const QuadraticParams& params, const Vector& b) {
  const int M = static_cast<int>(params.targets.size());
  const int N = static_cast<int>(params.rhs.size());
  const int n = N * M + N;
  Matrix k = Matrix::Zero(n, n);
  Vector r = Vector::Zero(n);
  for (int m = 0; m < M; ++m) {
    const int o = m * N;
    k.block(o, o, N, N) = 2.0 * b(m) * Matrix::Identity(N, N);
    k.block(o, N * M, N, N) = params.matrices[m].transpose();
    k.block(N * M, o, N, N) = params.matrices[m];
    r.segment(o, N) = 2.0 * b(m) * params.targets[m];
  }
  r.tail(N) = params.rhs;
  const Vector z = k.fullPivLu().solve(r);
  return {BlockPoint(M, N, z.head(N * M)), z.tail(N)};
}

BlockPoint differentiated_kkt_velocity(const ProblemDefinition& problem, const BlockPoint& x,
                                       const Vector& b, const Vector& c) {
  const int M = problem.agents();
  const int N = problem.dimension();
  std::vector<AgentDerivatives> d;
  for (int m = 0; m < M; ++m) d.push_back(problem.derivatives(m, x.block(m)));
  // common units: the scale of agent 1
  const double ref = d[0].log_scale;
  std::vector<Vector> grad(M);
  std::vector<Matrix> hess(M);
  for (int m = 0; m < M; ++m) {
    const double s = std::exp(d[m].log_scale - ref);
    grad[m] = s * d[m].grad;
    hess[m] = s * d[m].hess;
  }
  const Vector lambda = -b(0) * d[0].jac_t.fullPivLu().solve(grad[0]);

  const int n = N * M + N;
  Matrix k = Matrix::Zero(n, n);
  Vector r = Vector::Zero(n);
  for (int m = 0; m < M; ++m) {
    Matrix h = b(m) * hess[m];
    for (int i = 0; i < N; ++i) h += lambda(i) * d[m].constraint_hess[i];
    const int o = m * N;
    k.block(o, o, N, N) = h;
    k.block(o, N * M, N, N) = d[m].jac_t;
    k.block(N * M, o, N, N) = d[m].jac_t.transpose();
    r.segment(o, N) = -c(m) * b(m) * grad[m];
  }
  const Vector z = k.fullPivLu().solve(r);
  return BlockPoint(M, N, z.head(N * M));
}

TunerQP brute_force_tuner_qp(const ThetaGrid& grid, std::span<const Matrix> gammas,
                             const Vector& m_hat, const Vector& psi, double mu) {
  const int M = static_cast<int>(psi.size());
  const int nodes = grid.nodes();
  const int n = M * nodes + M;
  Matrix k = Matrix::Zero(n, n);
  Vector r = Vector::Zero(n);
  for (int j = 0; j < nodes; ++j) {
    const double w = grid.weight(j);
    const Matrix& g = gammas[j];
    const int o = j * M;
    k.block(o, o, M, M) = w * (g.transpose() * g + mu * Matrix::Identity(M, M));
    k.block(o, M * nodes, M, M) = w * Matrix::Identity(M, M);
    k.block(M * nodes, o, M, M) = w * Matrix::Identity(M, M);
    r.segment(o, M) = w * g.transpose() * m_hat;
  }
  r.tail(M) = psi;
  const Vector z = k.fullPivLu().solve(r);
  TunerQP out;
  out.c = Eigen::Map<const Matrix>(z.data(), M, nodes);
  out.lambda = z.tail(M);
  return out;
}

namespace {

State random_e1_state(int M, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> x1(0.3, 2.5), x2(0.2, 0.9), logb(-1.0, 1.0);
  E1Params p;
  p.agents = M;
  auto problem = std::make_shared<E1Problem>(p);
  BlockPoint x(M, 2);
  Vector b(M);
  for (int m = 0; m < M; ++m) {
    x.block(m) << x1(rng), x2(rng);
    b(m) = std::exp(logb(rng)) / M;
  }
  return {problem, x, b};
}

State random_quadratic_state(int M, int N, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const std::uint64_t seed = rng();
  auto params = random_quadratic_params(M, N, seed);
  const Vector ptau = random_target_weights(M, seed);
  auto problem = std::make_shared<QuadraticProblem>(params, Vector::Ones(M), ptau);
  BlockPoint x(M, N);
  for (int m = 0; m < M; ++m)
    for (int i = 0; i < N; ++i) x.block(m)(i) = params.targets[m](i) + 0.5 * unit(rng);
  return {problem, x, random_target_weights(M, seed + 1)};
}

}  // namespace

std::vector<State> random_states(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<State> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    switch (i % 5) {
      case 0: out.push_back(random_e1_state(2, rng)); break;
      case 1: out.push_back(random_e1_state(5, rng)); break;
      case 2: out.push_back(random_e1_state(10, rng)); break;
      case 3: out.push_back(random_quadratic_state(2, 1 + (i / 5) % 2, rng)); break;
      default: out.push_back(random_quadratic_state(3, 1 + (i / 5) % 2, rng)); break;
    }
  }
  return out;
}

std::vector<State> kkt_states(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> logb(-0.5, 0.5);
  std::vector<State> out;
  out.reserve(count);
  for (int i = 0; out.size() < static_cast<std::size_t>(count) && i < 100 * count; ++i) {
    const int M = 2 + i % 2;
    if (i % 3 == 2) {
      // E1 at perturbed weights, solved by Newton from the symmetric optimum
      E1Params p;
      p.agents = M;
      p.log_rhs = 0.5 * M;
      auto problem = std::make_shared<E1Problem>(p);
      Vector b(M);
      for (int m = 0; m < M; ++m) b(m) = std::exp(logb(rng)) / M;
      const NewtonResult nr = newton_correct(*problem, problem->initial_solution(), b);
      if (!nr.converged()) continue;
      out.push_back({problem, nr.x, b});
    } else {
      const int N = 1 + (i / 3) % 2;
      const std::uint64_t s = rng();
      auto params = random_quadratic_params(M, N, s);
      auto problem = std::make_shared<QuadraticProblem>(params, Vector::Ones(M),
                                                        random_target_weights(M, s));
      const Vector b = random_target_weights(M, s + 7);
      out.push_back({problem, dense_quadratic_kkt(params, b).x, b});
    }
  }
  return out;
}

}  // namespace optvo::verify
