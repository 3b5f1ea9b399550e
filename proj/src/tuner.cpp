#include "optvo/tuner.hpp"

#include "optvo/errors.hpp"

#include <string>

namespace optvo {

Vector psi_from_endpoints(const Vector& p0, const Vector& ptau) {
  if (p0.size() != ptau.size()) throw std::invalid_argument("psi: endpoint size mismatch");
  Vector psi(p0.size());
  for (Eigen::Index m = 0; m < p0.size(); ++m) {
    const double ratio = ptau(m) / p0(m);
    if (!(ratio > 0.0) || !std::isfinite(ratio))
      throw HomotopyError("psi: weight ratio of agent " + std::to_string(m) +
                          " is not positive; a sign change has no log-rate homotopy");
    psi(m) = std::log(ratio);
  }
  return psi;
}

}  // namespace optvo
