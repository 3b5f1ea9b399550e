#pragma once

#include "optvo/problem.hpp"

#include <vector>

namespace optvo::testing {

/// f_m(x) = 1/2 x^T Q_m x + g_m^T x with linear constraints h_m(x) = H_m x.
/// Small hand-built instances used to trigger specific branches.
class StubProblem final : public ProblemDefinition {
 public:
  StubProblem(std::vector<Matrix> q, std::vector<Vector> g, std::vector<Matrix> h, Vector u,
              Vector p0, Vector ptau, BlockPoint x0)
      : ProblemDefinition(static_cast<int>(q.size()), static_cast<int>(u.size()), u, p0, ptau),
        q_(std::move(q)),
        g_(std::move(g)),
        h_(std::move(h)),
        x0_(std::move(x0)) {}

  std::string name() const override { return "stub"; }
  double objective_term(int m, const Vector& x) const override {
    return 0.5 * x.dot(q_[m] * x) + g_[m].dot(x);
  }
  AgentDerivatives derivatives(int m, const Vector& x) const override {
    AgentDerivatives d;
    d.grad = q_[m] * x + g_[m];
    d.hess = q_[m];
    d.jac_t = h_[m].transpose();
    d.constraint_hess.assign(dimension(), Matrix::Zero(dimension(), dimension()));
    return d;
  }
  Vector constraint(int m, const Vector& x) const override { return h_[m] * x; }
  BlockPoint initial_solution() const override { return x0_; }
  void check_domain(int, const Vector&) const override {}

 private:
  std::vector<Matrix> q_;
  std::vector<Vector> g_;
  std::vector<Matrix> h_;
  BlockPoint x0_;
};

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace optvo::testing
