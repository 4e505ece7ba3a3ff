#pragma once

// Special functions and the partition bookkeeping used by the multinomial expansion.

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "finnet/errors.hpp"

namespace finnet {

using cplx = std::complex<double>;

inline double ln_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("ln_gamma: argument must be positive, got " + std::to_string(x));
  return std::lgamma(x);
}

// Q(a, x) = Gamma(a, x) / Gamma(a).
inline double upper_incomplete_gamma_regularized(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) {
    throw DomainError("upper incomplete gamma: need a > 0 and x >= 0");
  }
  if (x == 0.0) return 1.0;
  return boost::math::gamma_q(a, x);
}

// P(a, x) = 1 - Q(a, x).
inline double lower_incomplete_gamma_regularized(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) {
    throw DomainError("lower incomplete gamma: need a > 0 and x >= 0");
  }
  if (x == 0.0) return 0.0;
  return boost::math::gamma_p(a, x);
}

namespace detail {

inline bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

inline bool near_integer(double x) { return std::abs(x - std::round(x)) < 1e-12 * std::max(1.0, std::abs(x)); }

// log|Gamma(x)| and sign for real x that is not a pole.
inline std::pair<double, int> log_abs_gamma(double x) {
  const double lg = std::lgamma(x);  // |Gamma|; sign handled below
  int sign = 1;
  if (x < 0.0 && static_cast<long long>(std::floor(x)) % 2 != 0) sign = -1;
  return {lg, sign};
}

// Gamma(n1) Gamma(n2) / (Gamma(d1) Gamma(d2)); zero if a denominator argument is a pole.
inline double gamma_quotient(double n1, double n2, double d1, double d2) {
  if (is_nonpositive_integer(d1) || is_nonpositive_integer(d2)) return 0.0;
  if (is_nonpositive_integer(n1) || is_nonpositive_integer(n2)) {
    throw NumericFailure("gamma quotient: pole in numerator");
  }
  const auto [l1, s1] = log_abs_gamma(n1);
  const auto [l2, s2] = log_abs_gamma(n2);
  const auto [l3, s3] = log_abs_gamma(d1);
  const auto [l4, s4] = log_abs_gamma(d2);
  return s1 * s2 * s3 * s4 * std::exp(l1 + l2 - l3 - l4);
}

struct SeriesResult {
  cplx value;
  bool converged;
  int terms;
};

// Maclaurin series sum_k (a)_k (b)_k / ((c)_k k!) z^k.
inline SeriesResult hyp2f1_series(double a, double b, double c, cplx z, int max_terms = 20000) {
  cplx term{1.0, 0.0};
  cplx sum{1.0, 0.0};
  int small = 0;
  for (int k = 0; k < max_terms; ++k) {
    const double num = (a + k) * (b + k);
    if (num == 0.0) return {sum, true, k + 1};  // terminating polynomial
    term *= num / ((c + k) * (k + 1.0)) * z;
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) {
      if (++small >= 2) return {sum, true, k + 1};
    } else {
      small = 0;
    }
    if (!std::isfinite(sum.real()) || !std::isfinite(sum.imag())) break;
  }
  return {sum, false, max_terms};
}

}  // namespace detail

// Gauss hypergeometric function 2F1(a, b; c; z) on the principal branch for real
// parameters and complex z off the cut [1, inf). Uses the Maclaurin series when
// |z| is small and otherwise the transformation (z/(z-1), 1/z or 1/(1-z)) whose
// argument has the smallest modulus. The 1/z and 1/(1-z) transformations need
// a - b to be non-integer; when no usable transformation exists the function
// throws NumericFailure and callers are expected to fall back to quadrature.
inline cplx hyp2f1(double a, double b, double c, cplx z) {
  if (detail::is_nonpositive_integer(c)) {
    throw DomainError("hyp2f1: c must not be a non-positive integer, got " + std::to_string(c));
  }
  if (z == cplx{0.0, 0.0}) return {1.0, 0.0};
  if (z.imag() == 0.0 && z.real() >= 1.0) {
    throw DomainError("hyp2f1: z lies on the branch cut [1, inf)");
  }
  // Polynomial case terminates for any z.
  if (detail::is_nonpositive_integer(a) || detail::is_nonpositive_integer(b)) {
    auto s = detail::hyp2f1_series(a, b, c, z);
    return s.value;
  }
  constexpr double kDirect = 0.6;
  constexpr double kLimit = 0.92;
  const double mz = std::abs(z);
  if (mz <= kDirect) {
    auto s = detail::hyp2f1_series(a, b, c, z);
    if (s.converged) return s.value;
  }
  const bool separable = !detail::near_integer(a - b);
  const cplx one{1.0, 0.0};
  const cplx w_pfaff = z / (z - one);
  const double m_pfaff = std::abs(w_pfaff);
  const double m_inv = separable ? 1.0 / mz : std::numeric_limits<double>::infinity();
  const double m_inv1 = separable ? 1.0 / std::abs(one - z) : std::numeric_limits<double>::infinity();
  const double best = std::min({m_pfaff, m_inv, m_inv1});
  if (best > kLimit && mz < 1.0) {
    // Slow but convergent; terms decay like |z|^n.
    auto s = detail::hyp2f1_series(a, b, c, z, 200000);
    if (s.converged) return s.value;
  }
  if (best > kLimit) {
    throw NumericFailure("hyp2f1: no convergent transformation for a=" + std::to_string(a) +
                         ", b=" + std::to_string(b) + ", c=" + std::to_string(c) + ", z=(" +
                         std::to_string(z.real()) + "," + std::to_string(z.imag()) + ")" +
                         (separable ? "" : " (a - b is an integer)"));
  }
  auto need = [&](const detail::SeriesResult& s) {
    if (!s.converged) {
      throw NumericFailure("hyp2f1: series did not converge after " + std::to_string(s.terms) + " terms");
    }
    return s.value;
  };
  if (best == m_pfaff) {
    // 2F1(a,b;c;z) = (1-z)^(-a) 2F1(a, c-b; c; z/(z-1))
    return std::exp(-a * std::log(one - z)) * need(detail::hyp2f1_series(a, c - b, c, w_pfaff));
  }
  if (best == m_inv) {
    const cplx w = one / z;
    const cplx lmz = std::log(-z);
    const double g1 = detail::gamma_quotient(c, b - a, b, c - a);
    const double g2 = detail::gamma_quotient(c, a - b, a, c - b);
    cplx out{};
    if (g1 != 0.0) out += g1 * std::exp(-a * lmz) * need(detail::hyp2f1_series(a, a - c + 1.0, a - b + 1.0, w));
    if (g2 != 0.0) out += g2 * std::exp(-b * lmz) * need(detail::hyp2f1_series(b, b - c + 1.0, b - a + 1.0, w));
    return out;
  }
  const cplx w = one / (one - z);
  const cplx l1z = std::log(one - z);
  const double g1 = detail::gamma_quotient(c, b - a, b, c - a);
  const double g2 = detail::gamma_quotient(c, a - b, a, c - b);
  cplx out{};
  if (g1 != 0.0) out += g1 * std::exp(-a * l1z) * need(detail::hyp2f1_series(a, c - b, a - b + 1.0, w));
  if (g2 != 0.0) out += g2 * std::exp(-b * l1z) * need(detail::hyp2f1_series(b, c - a, b - a + 1.0, w));
  return out;
}

inline double hyp2f1(double a, double b, double c, double z) {
  return hyp2f1(a, b, c, cplx{z, 0.0}).real();
}

// ---------------------------------------------------------------------------
// Partitions of j into at most M parts, standing in for the compositions
// t_1 + ... + t_M = j whose summand only depends on the multiset of t_i.

struct PartitionTerm {
  std::vector<int> parts;                // non-increasing, all >= 1
  std::uint64_t arrangement_count = 1;   // number of compositions with this multiset
  std::uint64_t multinomial_weight = 1;  // j! / (t_1! ... t_k!)
};

namespace detail {

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw NumericFailure("partition weights overflow 64 bits");
  return out;
}

inline std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f = checked_mul(f, static_cast<std::uint64_t>(i));
  return f;
}

// C(n, k) computed incrementally so every intermediate value is an integer.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t c = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    unsigned __int128 t = static_cast<unsigned __int128>(c) * (n - i);
    t /= (i + 1);
    if (t > std::numeric_limits<std::uint64_t>::max()) throw NumericFailure("binomial overflow");
    c = static_cast<std::uint64_t>(t);
  }
  return c;
}

inline void partitions_rec(int remaining, int max_part, int max_len, std::vector<int>& cur,
                           std::vector<std::vector<int>>& out) {
  if (remaining == 0) {
    out.push_back(cur);
    return;
  }
  if (static_cast<int>(cur.size()) == max_len) return;
  for (int p = std::min(remaining, max_part); p >= 1; --p) {
    cur.push_back(p);
    partitions_rec(remaining - p, p, max_len, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

inline std::vector<PartitionTerm> enumerate_weighted_partitions(int j, int slots) {
  if (j < 0) throw InvalidParameter("partition total must be non-negative");
  if (slots < 1) throw InvalidParameter("partition needs at least one slot");
  std::vector<std::vector<int>> raw;
  std::vector<int> cur;
  detail::partitions_rec(j, j, slots, cur, raw);
  std::vector<PartitionTerm> out;
  out.reserve(raw.size());
  const std::uint64_t jf = detail::factorial(j);
  for (auto& parts : raw) {
    PartitionTerm t;
    const int k = static_cast<int>(parts.size());
    // slots! / ((slots-k)! prod mult!) = C(slots, k) * k! / prod mult!
    std::uint64_t perm = detail::factorial(k);
    std::uint64_t denom = 1;
    std::uint64_t wden = 1;
    for (int i = 0; i < k;) {
      int e = i;
      while (e < k && parts[e] == parts[i]) ++e;
      denom = detail::checked_mul(denom, detail::factorial(e - i));
      i = e;
    }
    for (int p : parts) wden = detail::checked_mul(wden, detail::factorial(p));
    t.arrangement_count = detail::checked_mul(detail::binomial(slots, k), perm / denom);
    t.multinomial_weight = jf / wden;
    t.parts = std::move(parts);
    out.push_back(std::move(t));
  }
  return out;
}

// Memoized variant; partitions of small j are reused across the outage sums.
inline const std::vector<PartitionTerm>& cached_partitions(int j, int slots) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<PartitionTerm>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find({j, slots});
  if (it == cache.end()) it = cache.emplace(std::pair{j, slots}, enumerate_weighted_partitions(j, slots)).first;
  return it->second;
}

}  // namespace finnet
