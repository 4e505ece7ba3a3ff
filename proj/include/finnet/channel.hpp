#pragma once

// Fading power-gain laws. All gains have unit mean.

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "finnet/errors.hpp"
#include "finnet/specfun.hpp"

namespace finnet {

// Nakagami-m fading on the reference link (m0) and on every interference link (m).
struct NakagamiChannel {
  double m0 = 1.0;
  double m = 1.0;
  // Set by the Hoyt/Rice constructors, whose m is a moment-matched approximation.
  bool approximate = false;

  NakagamiChannel() = default;
  NakagamiChannel(double m0_, double m_) : m0(m0_), m(m_) { validate(); }

  void validate() const {
    if (!(m0 >= 0.5) || !(m >= 0.5) || !std::isfinite(m0) || !std::isfinite(m)) {
      throw InvalidParameter("Nakagami parameters must satisfy m >= 0.5 (got m0=" + std::to_string(m0) +
                             ", m=" + std::to_string(m) + ")");
    }
  }

  bool integer_m0() const { return m0 == std::floor(m0); }

  // Nakagami-q (Hoyt), q in (0, 1], by matching the second moment of the power gain:
  // m = (1 + q^2)^2 / (2 (1 + q^4)), so q = 1 is Rayleigh and q -> 0 gives m = 1/2.
  static double m_from_hoyt(double q) {
    if (!(q > 0.0) || q > 1.0) throw InvalidParameter("Hoyt q must lie in (0, 1]");
    const double q2 = q * q;
    return (1.0 + q2) * (1.0 + q2) / (2.0 * (1.0 + q2 * q2));
  }

  // Nakagami-n (Rice), n >= 0: m = (1 + n^2)^2 / (1 + 2 n^2).
  static double m_from_rice(double n) {
    if (!(n >= 0.0)) throw InvalidParameter("Rice n must be non-negative");
    const double n2 = n * n;
    return (1.0 + n2) * (1.0 + n2) / (1.0 + 2.0 * n2);
  }

  static NakagamiChannel hoyt(double q_ref, double q_int) {
    NakagamiChannel c(m_from_hoyt(q_ref), m_from_hoyt(q_int));
    c.approximate = true;
    return c;
  }

  static NakagamiChannel rice(double n_ref, double n_int) {
    NakagamiChannel c(m_from_rice(n_ref), m_from_rice(n_int));
    c.approximate = true;
    return c;
  }
};

// Gamma(m, 1/m) density of the power gain.
inline double nakagami_power_gain_pdf(double m, double g) {
  if (!(m >= 0.5)) throw InvalidParameter("Nakagami m must be >= 0.5");
  if (g < 0.0) return 0.0;
  if (g == 0.0) {
    if (m == 1.0) return 1.0;
    return m < 1.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return std::exp((m - 1.0) * std::log(g) + m * std::log(m) - m * g - std::lgamma(m));
}

inline double nakagami_power_gain_cdf(double m, double g) {
  if (g <= 0.0) return 0.0;
  return lower_incomplete_gamma_regularized(m, m * g);
}

// F(g) = 1 - sum_n exp(-n g) sum_k a_nk g^k.
struct GeneralFadingCdf {
  struct Term {
    int n = 1;
    int k = 0;
    double a = 0.0;
  };
  std::vector<Term> terms;

  GeneralFadingCdf() = default;
  explicit GeneralFadingCdf(std::vector<Term> t) : terms(std::move(t)) { validate(); }

  std::set<int> exponents() const {
    std::set<int> out;
    for (const auto& t : terms) out.insert(t.n);
    return out;
  }

  int max_power() const {
    int k = 0;
    for (const auto& t : terms) k = std::max(k, t.k);
    return k;
  }

  double raw(double g) const {
    double s = 0.0;
    for (const auto& t : terms) s += std::exp(-t.n * g) * t.a * std::pow(g, t.k);
    return 1.0 - s;
  }

  void validate() const {
    if (terms.empty()) throw ModelInconsistency("fading CDF needs at least one term");
    for (const auto& t : terms) {
      if (t.n < 1) throw ModelInconsistency("fading CDF exponent n must be a positive integer");
      if (t.k < 0) throw ModelInconsistency("fading CDF power k must be non-negative");
      if (!std::isfinite(t.a)) throw ModelInconsistency("fading CDF coefficient is not finite");
    }
    if (raw(0.0) < -1e-14) throw ModelInconsistency("fading CDF is negative at g = 0");
    // Monotone on a grid reaching well into the tail.
    double prev = raw(0.0);
    for (int i = 1; i <= 400; ++i) {
      const double g = 0.05 * i;
      const double v = raw(g);
      if (v < prev - 1e-12) throw ModelInconsistency("fading CDF decreases near g = " + std::to_string(g));
      prev = v;
    }
  }
};

inline GeneralFadingCdf nakagami_as_general_cdf(double m0) {
  if (!(m0 >= 1.0) || m0 != std::floor(m0)) {
    throw Unsupported("the exponential-polynomial fading CDF needs an integer m0 >= 1, got " +
                      std::to_string(m0));
  }
  const int n = static_cast<int>(m0);
  std::vector<GeneralFadingCdf::Term> terms;
  double a = 1.0;
  for (int k = 0; k < n; ++k) {
    if (k > 0) a *= m0 / k;
    terms.push_back({n, k, a});
  }
  return GeneralFadingCdf(std::move(terms));
}

inline double general_cdf_eval(const GeneralFadingCdf& cdf, double g) {
  if (g < 0.0) throw InvalidParameter("fading CDF argument must be non-negative");
  const double v = cdf.raw(g);
  if (v < -1e-14 || v > 1.0 + 1e-14) {
    throw ModelInconsistency("fading CDF evaluates to " + std::to_string(v) + " at g = " + std::to_string(g));
  }
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace finnet
