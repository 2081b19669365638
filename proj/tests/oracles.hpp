#pragma once

#include "wlc/unit_loop.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace oracle {

// Covariance of the centred discrete bridge whose free increments have
// variance 2/N: C = P B P with B(j,k) = (2/N)(min(j,k) - j k / N).
inline Eigen::MatrixXd centred_bridge_covariance(Eigen::Index n) {
  Eigen::MatrixXd b(n, n);
  const double dn = static_cast<double>(n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      b(j, k) = 2.0 / dn * (static_cast<double>(std::min(j, k)) - static_cast<double>(j * k) / dn);
  const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / dn);
  return p * b * p;
}

// Continuum covariance of the centred loop.
inline double continuum_covariance(double s, double t) {
  return 2.0 * (std::min(s, t) - s * t) - s * (1.0 - s) - t * (1.0 - t) + 1.0 / 6.0;
}

inline wlc::Loop diamond() {
  Eigen::MatrixXd p(2, 4);
  // rows z, x
  p << 0, 1, 0, -1,
       1, 0, -1, 0;
  return wlc::Loop(p);
}

}  // namespace oracle
