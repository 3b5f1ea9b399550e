#include "optvo/e1_problem.hpp"

#include "optvo/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace optvo {

namespace {

// 2^{0.1/x} = exp(kRateExponent / x)
constexpr double kRateExponent = 0.1 * std::numbers::ln2;

// s(x2) = (2^{0.1/x2} - 1)^{-1/2} and its first two derivatives.
struct RateFactor {
  double s;
  double ds;
  double d2s;
};

RateFactor rate_factor(double x2) {
  const double t = kRateExponent / x2;
  const double g = std::expm1(t);
  // r = e^t / (e^t - 1), stable for large t
  const double r = -1.0 / std::expm1(-t);
  const double s = std::exp(-0.5 * std::log(g));
  const double q = kRateExponent * r / (2.0 * x2 * x2);
  const double dq = kRateExponent * r / (2.0 * x2 * x2 * x2) * ((r - 1.0) * t - 2.0);
  return {s, s * q, s * (q * q + dq)};
}

E1Params validated(const E1Params& p) {
  if (p.agents < 2) throw std::invalid_argument("E1: agents must be >= 2");
  if (!(p.gamma0 > 0.0)) throw std::invalid_argument("E1: gamma0 must be positive");
  if (!(p.resolved_log_rhs() > 0.0)) throw std::invalid_argument("E1: log_rhs must be positive");
  return p;
}

}  // namespace

Vector power_law_weights(int agents, double exponent) {
  Vector a(agents);
  for (int m = 0; m < agents; ++m) a(m) = std::pow(static_cast<double>(m + 1), -exponent);
  return a / a.sum();
}

double log_erfc(double z) {
  if (z < 26.0) return std::log(std::erfc(z));
  // erfc(z) = exp(-z^2) / (z sqrt(pi)) * (1 - 1/(2z^2) + 3/(2z^2)^2 - ...)
  const double w = 1.0 / (2.0 * z * z);
  double term = 1.0;
  double series = 1.0;
  for (int k = 1; k <= 8; ++k) {
    term *= -(2.0 * k - 1.0) * w;
    series += term;
  }
  return -z * z - std::log(z * std::sqrt(std::numbers::pi)) + std::log(series);
}

E1Problem::E1Problem(const E1Params& params)
    : E1Problem(params, Vector::Constant(params.agents, 1.0 / params.agents),
                power_law_weights(params.agents, params.exponent)) {}

E1Problem::E1Problem(const E1Params& params, Vector p0, Vector ptau)
    : ProblemDefinition(validated(params).agents, 2,
                        Vector{{params.resolved_log_rhs(), 1.0}}, std::move(p0), std::move(ptau)),
      params_(params) {
  // initial_solution() is the symmetric optimum, which requires uniform p0
  const Vector& w = initial_weights();
  if ((w.array() != w(0)).any() || !(w(0) > 0.0))
    throw std::invalid_argument("E1: initial weights must be uniform and positive");
}

void E1Problem::check_domain(int m, const Vector& x_m) const {
  if (x_m.size() != 2) throw DomainError(m, "E1: agent block must have two components");
  if (!std::isfinite(x_m(0)) || !std::isfinite(x_m(1)))
    throw DomainError(m, "E1: non-finite component at agent " + std::to_string(m));
  if (!(x_m(0) > -1.0))
    throw DomainError(m, "E1: x_{m,1} <= -1 at agent " + std::to_string(m));
  if (!(x_m(1) > kE1DomainEpsilon))
    throw DomainError(m, "E1: x_{m,2} <= 1e-9 at agent " + std::to_string(m));
}

double E1Problem::erfc_argument(const Vector& x_m) const {
  return params_.gamma0 * x_m(0) * rate_factor(x_m(1)).s;
}

double E1Problem::objective_term(int m, const Vector& x_m) const {
  check_domain(m, x_m);
  return std::erfc(erfc_argument(x_m));
}

double E1Problem::log_objective_term(int m, const Vector& x_m) const {
  check_domain(m, x_m);
  return log_erfc(erfc_argument(x_m));
}

AgentDerivatives E1Problem::derivatives(int m, const Vector& x_m) const {
  check_domain(m, x_m);
  const double g0 = params_.gamma0;
  const RateFactor rf = rate_factor(x_m(1));
  const double x1 = x_m(0);
  const double z = g0 * x1 * rf.s;

  const Eigen::Vector2d dz{g0 * rf.s, g0 * x1 * rf.ds};
  Eigen::Matrix2d d2z;
  d2z << 0.0, g0 * rf.ds, g0 * rf.ds, g0 * x1 * rf.d2s;

  // erfc'(z) = -2/sqrt(pi) e^{-z^2},  erfc''(z) = 4z/sqrt(pi) e^{-z^2}
  const double c1 = -2.0 * std::numbers::inv_sqrtpi;
  const double c2 = 4.0 * z * std::numbers::inv_sqrtpi;

  AgentDerivatives d;
  d.log_scale = -z * z;
  d.grad = c1 * dz;
  d.hess = c2 * dz * dz.transpose() + c1 * d2z;

  const double inv = 1.0 / (1.0 + x1);
  d.jac_t = Matrix::Zero(2, 2);
  d.jac_t(0, 0) = inv;
  d.jac_t(1, 1) = 2.0 * x_m(1);
  d.constraint_hess.assign(2, Matrix::Zero(2, 2));
  d.constraint_hess[0](0, 0) = -inv * inv;
  d.constraint_hess[1](1, 1) = 2.0;
  return d;
}

Vector E1Problem::constraint(int m, const Vector& x_m) const {
  check_domain(m, x_m);
  return Vector{{std::log1p(x_m(0)), x_m(1) * x_m(1)}};
}

BlockPoint E1Problem::initial_solution() const {
  const int M = agents();
  BlockPoint x(M, 2);
  const double x1 = std::expm1(params_.resolved_log_rhs() / M);
  const double x2 = std::sqrt(1.0 / M);
  for (int m = 0; m < M; ++m) x.block(m) << x1, x2;
  return x;
}

}  // namespace optvo
