#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "finnet/channel.hpp"
#include "finnet/errors.hpp"
#include "finnet/geometry.hpp"

namespace finnet {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

// One reference link, M interferers placed uniformly in the region, unit transmit powers.
struct Scenario {
  Region region = Disk({0.0, 0.0}, 1.0);
  Point receiver;
  double r0 = 1.0;     // reference link length
  int interferers = 0;  // M
  NakagamiChannel channel;
  double alpha = 4.0;  // path-loss exponent
  double beta = 1.0;   // SINR threshold, linear
  double rho0 = 1.0;   // average SNR of the reference link, linear

  void validate() const {
    if (!region.contains(receiver)) throw InvalidParameter("receiver lies outside the region");
    if (!(r0 > 0.0)) throw InvalidParameter("r0 must be positive");
    if (interferers < 0) throw InvalidParameter("M must be non-negative");
    channel.validate();
    if (!(alpha >= 2.0 && alpha <= 6.0)) throw InvalidParameter("alpha must lie in [2, 6]");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidParameter("beta must be positive");
    if (!(rho0 > 0.0) || !std::isfinite(rho0)) throw InvalidParameter("rho0 must be positive");
  }
};

enum class Method { Mgf, Rlpg, MonteCarlo, Ppp };

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::Mgf: return "mgf";
    case Method::Rlpg: return "rlpg";
    case Method::MonteCarlo: return "mc";
    case Method::Ppp: return "ppp";
  }
  return "?";
}

struct OutageResult {
  double epsilon = 0.0;
  Method method = Method::Rlpg;
  double tolerance = 0.0;  // nominal absolute accuracy of epsilon
  std::optional<double> std_error;
  std::optional<std::uint64_t> trials;
  std::vector<std::string> warnings;
};

// Values within slack of [0, 1] are clamped with a warning; anything further out is a failure.
inline double clamp_probability(double p, std::vector<std::string>& warnings, double slack = 1e-9) {
  if (!std::isfinite(p)) throw NumericFailure("outage probability is not finite");
  if (p < -slack || p > 1.0 + slack) {
    throw NumericFailure("outage probability " + std::to_string(p) + " is outside [0, 1]");
  }
  if (p < 0.0) {
    warnings.push_back("clamped " + std::to_string(p) + " to 0");
    return 0.0;
  }
  if (p > 1.0) {
    warnings.push_back("clamped " + std::to_string(p) + " to 1");
    return 1.0;
  }
  return p;
}

}  // namespace finnet
