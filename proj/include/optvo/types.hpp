#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace optvo {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;

/// Stacked decision vector of M agent blocks, each of length N.
class BlockPoint {
 public:
  BlockPoint() = default;
  BlockPoint(int agents, int dimension)
      : agents_(agents), dimension_(dimension), flat_(Vector::Zero(agents * dimension)) {}
  BlockPoint(int agents, int dimension, Vector flat)
      : agents_(agents), dimension_(dimension), flat_(std::move(flat)) {
    if (flat_.size() != static_cast<Eigen::Index>(agents) * dimension)
      throw std::invalid_argument("BlockPoint: flat size does not match agents * dimension");
  }

  int agents() const { return agents_; }
  int dimension() const { return dimension_; }

  auto block(int m) { return flat_.segment(static_cast<Eigen::Index>(m) * dimension_, dimension_); }
  auto block(int m) const {
    return flat_.segment(static_cast<Eigen::Index>(m) * dimension_, dimension_);
  }

  Vector& flat() { return flat_; }
  const Vector& flat() const { return flat_; }

  bool same_shape(const BlockPoint& other) const {
    return agents_ == other.agents_ && dimension_ == other.dimension_;
  }

 private:
  int agents_ = 0;
  int dimension_ = 0;
  Vector flat_;
};

/// Uniform grid theta_j = j * delta_theta, j = 0..steps, on [0, tau].
class ThetaGrid {
 public:
  ThetaGrid() = default;

  /// Throws std::invalid_argument unless tau / delta_theta is a positive integer (to 1e-9).
  ThetaGrid(double tau, double delta_theta) : tau_(tau) {
    if (!(tau > 0.0) || !(delta_theta > 0.0) || !std::isfinite(tau) || !std::isfinite(delta_theta))
      throw std::invalid_argument("ThetaGrid: tau and delta_theta must be positive");
    const double ratio = tau / delta_theta;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
      throw std::invalid_argument("ThetaGrid: tau must be an integer multiple of delta_theta");
    steps_ = static_cast<int>(rounded);
    delta_ = tau_ / steps_;
  }

  static ThetaGrid from_steps(double tau, int steps) { return ThetaGrid(tau, tau / steps); }

  double tau() const { return tau_; }
  double delta_theta() const { return delta_; }
  int steps() const { return steps_; }
  int nodes() const { return steps_ + 1; }
  double theta(int j) const { return j == steps_ ? tau_ : j * delta_; }

  /// Composite trapezoid weight of node j.
  double weight(int j) const { return (j == 0 || j == steps_) ? 0.5 * delta_ : delta_; }

 private:
  double tau_ = 1.0;
  double delta_ = 1.0;
  int steps_ = 1;
};

}  // namespace optvo
