#include "optvo/quadratic_problem.hpp"

#include <random>
#include <stdexcept>

namespace optvo {

namespace {

int checked_agents(const QuadraticParams& p) {
  if (p.targets.empty() || p.targets.size() != p.matrices.size())
    throw std::invalid_argument("quadratic: need one target and one matrix per agent");
  return static_cast<int>(p.targets.size());
}

int checked_dimension(const QuadraticParams& p) {
  const auto n = p.rhs.size();
  for (std::size_t m = 0; m < p.targets.size(); ++m) {
    if (p.targets[m].size() != n || p.matrices[m].rows() != n || p.matrices[m].cols() != n)
      throw std::invalid_argument("quadratic: inconsistent block dimensions");
    Eigen::PartialPivLU<Matrix> lu(p.matrices[m]);
    if (!(lu.rcond() > 1e-12)) throw std::invalid_argument("quadratic: A_m must be invertible");
  }
  return static_cast<int>(n);
}

}  // namespace

QuadraticParams random_quadratic_params(int agents, int dimension, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  QuadraticParams p;
  Vector aq = Vector::Zero(dimension);
  for (int m = 0; m < agents; ++m) {
    Matrix a = Matrix::Identity(dimension, dimension);
    for (int i = 0; i < dimension; ++i)
      for (int j = 0; j < dimension; ++j) a(i, j) += 0.1 * unit(rng);
    Vector q(dimension);
    for (int i = 0; i < dimension; ++i) q(i) = unit(rng);
    aq += a * q;
    p.matrices.push_back(std::move(a));
    p.targets.push_back(std::move(q));
  }
  // sum_m A_m q_m - u is positive and well separated from zero
  Vector offset(dimension);
  for (int i = 0; i < dimension; ++i) offset(i) = 1.0 + 0.5 * i;
  p.rhs = aq - offset;
  return p;
}

Vector random_target_weights(int agents, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> expo(-2.0, 2.0);
  Vector w(agents);
  for (int m = 0; m < agents; ++m) w(m) = std::exp2(expo(rng));
  return w;
}

QuadraticProblem::QuadraticProblem(QuadraticParams params, Vector p0, Vector ptau)
    : ProblemDefinition(checked_agents(params), checked_dimension(params), params.rhs,
                        std::move(p0), std::move(ptau)),
      params_(std::move(params)) {}

double QuadraticProblem::objective_term(int m, const Vector& x_m) const {
  return (x_m - params_.targets[m]).squaredNorm();
}

AgentDerivatives QuadraticProblem::derivatives(int m, const Vector& x_m) const {
  const int n = dimension();
  AgentDerivatives d;
  d.grad = 2.0 * (x_m - params_.targets[m]);
  d.hess = 2.0 * Matrix::Identity(n, n);
  d.jac_t = params_.matrices[m].transpose();
  d.constraint_hess.assign(n, Matrix::Zero(n, n));
  return d;
}

Vector QuadraticProblem::constraint(int m, const Vector& x_m) const {
  return params_.matrices[m] * x_m;
}

BlockPoint QuadraticProblem::solve(const Vector& weights, Vector* multiplier) const {
  const int M = agents();
  const int n = dimension();
  Matrix s = Matrix::Zero(n, n);
  Vector r = -rhs();
  for (int m = 0; m < M; ++m) {
    const Matrix& a = params_.matrices[m];
    s += a * a.transpose() / (2.0 * weights(m));
    r += a * params_.targets[m];
  }
  const Vector lambda = s.ldlt().solve(r);
  BlockPoint x(M, n);
  for (int m = 0; m < M; ++m)
    x.block(m) = params_.targets[m] - params_.matrices[m].transpose() * lambda / (2.0 * weights(m));
  if (multiplier) *multiplier = lambda;
  return x;
}

BlockPoint QuadraticProblem::initial_solution() const { return solve(initial_weights()); }

}  // namespace optvo
