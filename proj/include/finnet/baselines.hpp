#pragma once

#include <cmath>

#include "finnet/errors.hpp"
#include "finnet/geometry.hpp"

namespace finnet {

// Rayleigh outage for a receiver in an infinite Poisson field of density lambda:
//   1 - exp(-beta/rho0) exp(-lambda pi r0^2 beta^(2/alpha) (2 pi/alpha) csc(2 pi/alpha)).
inline double outage_ppp_rayleigh(double lambda, double r0, double alpha, double beta, double rho0) {
  if (!(alpha > 2.0)) throw DomainError("infinite-field interference diverges for alpha <= 2");
  if (!(lambda >= 0.0) || !(r0 > 0.0) || !(beta > 0.0) || !(rho0 > 0.0)) {
    throw InvalidParameter("PPP baseline needs lambda >= 0 and r0, beta, rho0 > 0");
  }
  const double delta = 2.0 / alpha;
  const double x = kPi * delta;
  const double expo = beta / rho0 + lambda * kPi * r0 * r0 * std::pow(beta, delta) * x / std::sin(x);
  return -std::expm1(-expo);
}

}  // namespace finnet
