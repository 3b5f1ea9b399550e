#pragma once

#include "optvo/counters.hpp"
#include "optvo/types.hpp"

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace optvo {

/// Log-rate functions c_m(theta) = b_m'(theta) / b_m(theta) sampled on the grid nodes.
template <typename Scalar>
struct ParametricPathT {
  ThetaGrid grid;
  /// M x (L+1); column j holds c(theta_j).
  MatrixX<Scalar> values;

  int agents() const { return static_cast<int>(values.rows()); }
  auto at(int j) const { return values.col(j); }
};

using ParametricPath = ParametricPathT<double>;

template <typename Scalar>
struct TuneResultT {
  ParametricPathT<Scalar> path;
  /// Multiplier of the integral constraint.
  VectorX<Scalar> lambda;
};

using TuneResult = TuneResultT<double>;

/// psi_m = log(ptau_m / p0_m). Throws HomotopyError when a ratio is not positive.
Vector psi_from_endpoints(const Vector& p0, const Vector& ptau);

/// Composite trapezoid integral of every component of c over [0, tau].
template <typename Scalar>
VectorX<Scalar> integrate(const ParametricPathT<Scalar>& c) {
  VectorX<Scalar> acc = VectorX<Scalar>::Zero(c.values.rows());
  for (int j = 0; j < c.grid.nodes(); ++j) acc += Scalar(c.grid.weight(j)) * c.values.col(j);
  return acc;
}

/// Constant-rate path c_m = psi_m / tau.
template <typename Scalar>
ParametricPathT<Scalar> init_c(const ThetaGrid& grid, const VectorX<Scalar>& psi) {
  ParametricPathT<Scalar> c{grid, MatrixX<Scalar>(psi.size(), grid.nodes())};
  c.values.colwise() = psi / Scalar(grid.tau());
  return c;
}

/// Closed-form minimizer of the discretized functional
///   int |Gamma c - m_hat|^2 + mu |c|^2  s.t.  int c = psi,
/// with every integral taken by the composite trapezoid rule on the grid:
///   c_j = Pi_j^{-1}(Gamma_j^T m_hat - lambda),  Pi_j = Gamma_j^T Gamma_j + mu I,
///   lambda = (sum_j w_j Pi_j^{-1})^{-1} (sum_j w_j Pi_j^{-1} Gamma_j^T m_hat - psi).
template <typename Scalar>
TuneResultT<Scalar> tune(const ThetaGrid& grid, std::span<const MatrixX<Scalar>> gammas,
                         const VectorX<Scalar>& m_hat, const VectorX<Scalar>& psi, Scalar mu,
                         CostCounters* counters = nullptr) {
  if (!(mu > Scalar(0))) throw std::invalid_argument("tune: mu must be positive");
  if (static_cast<int>(gammas.size()) != grid.nodes())
    throw std::invalid_argument("tune: need one Gamma per grid node");
  const auto M = psi.size();
  std::vector<MatrixX<Scalar>> pi_inv;
  std::vector<VectorX<Scalar>> projected;
  pi_inv.reserve(gammas.size());
  projected.reserve(gammas.size());
  MatrixX<Scalar> int_pi_inv = MatrixX<Scalar>::Zero(M, M);
  VectorX<Scalar> int_proj = VectorX<Scalar>::Zero(M);
  const MatrixX<Scalar> eye = MatrixX<Scalar>::Identity(M, M);
  for (int j = 0; j < grid.nodes(); ++j) {
    const MatrixX<Scalar>& g = gammas[j];
    if (g.cols() != M || g.rows() != m_hat.size())
      throw std::invalid_argument("tune: Gamma shape mismatch");
    if (!g.allFinite()) throw std::invalid_argument("tune: non-finite Gamma entry");
    MatrixX<Scalar> pi = g.transpose() * g;
    pi.diagonal().array() += mu;
    Eigen::LLT<MatrixX<Scalar>> llt(pi);
    count_weight_solve(counters);
    if (llt.info() != Eigen::Success) throw std::runtime_error("tune: Pi is not positive definite");
    pi_inv.push_back(llt.solve(eye));
    projected.push_back(g.transpose() * m_hat);
    const Scalar w(grid.weight(j));
    int_pi_inv += w * pi_inv.back();
    int_proj += w * (pi_inv.back() * projected.back());
  }
  Eigen::LDLT<MatrixX<Scalar>> a_ldlt(int_pi_inv);
  count_weight_solve(counters);
  if (a_ldlt.info() != Eigen::Success || !(a_ldlt.rcond() > Scalar(0)))
    throw std::runtime_error("tune: integral of Pi^{-1} is singular");

  TuneResultT<Scalar> out;
  out.lambda = a_ldlt.solve(int_proj - psi);
  out.path.grid = grid;
  out.path.values.resize(M, grid.nodes());
  for (int j = 0; j < grid.nodes(); ++j)
    out.path.values.col(j) = pi_inv[j] * (projected[j] - out.lambda);
  return out;
}

/// max_j |Gamma_j^T (Gamma_j c_j - m_hat) + mu c_j + lambda|.
template <typename Scalar>
Scalar stationarity_residual(const ParametricPathT<Scalar>& c,
                             std::span<const MatrixX<Scalar>> gammas, const VectorX<Scalar>& m_hat,
                             Scalar mu, const VectorX<Scalar>& lambda) {
  Scalar worst(0);
  for (int j = 0; j < c.grid.nodes(); ++j) {
    const MatrixX<Scalar>& g = gammas[j];
    const VectorX<Scalar> cj = c.values.col(j);
    const VectorX<Scalar> r = g.transpose() * (g * cj - m_hat) + mu * cj + lambda;
    worst = std::max(worst, r.norm());
  }
  return worst;
}

/// Trapezoid value of int |Gamma c - m_hat|^2 + mu |c|^2.
template <typename Scalar>
Scalar j2_objective(const ParametricPathT<Scalar>& c, std::span<const MatrixX<Scalar>> gammas,
                    const VectorX<Scalar>& m_hat, Scalar mu) {
  Scalar acc(0);
  for (int j = 0; j < c.grid.nodes(); ++j) {
    const VectorX<Scalar> cj = c.values.col(j);
    acc += Scalar(c.grid.weight(j)) *
           ((gammas[j] * cj - m_hat).squaredNorm() + mu * cj.squaredNorm());
  }
  return acc;
}

/// b_m(theta_j) = p0_m exp(int_0^{theta_j} c_m), cumulative trapezoid. M x (L+1).
/// Throws std::overflow_error when a weight leaves the finite range.
template <typename Scalar>
MatrixX<Scalar> reconstruct_b(const ParametricPathT<Scalar>& c, const VectorX<Scalar>& p0) {
  if (p0.size() != c.values.rows()) throw std::invalid_argument("reconstruct_b: p0 size mismatch");
  const ThetaGrid& grid = c.grid;
  MatrixX<Scalar> b(c.values.rows(), grid.nodes());
  VectorX<Scalar> log_ratio = VectorX<Scalar>::Zero(p0.size());
  b.col(0) = p0;
  const Scalar half(0.5 * grid.delta_theta());
  for (int j = 1; j < grid.nodes(); ++j) {
    log_ratio += half * (c.values.col(j - 1) + c.values.col(j));
    b.col(j) = p0.array() * log_ratio.array().exp();
    if (!b.col(j).allFinite() || (b.col(j).array() == Scalar(0)).any())
      throw std::overflow_error("reconstruct_b: weight overflow at node " + std::to_string(j));
  }
  return b;
}

}  // namespace optvo
