#pragma once

// Outage probability for an integer reference-link shape m0 (or any
// exponential-polynomial reference fading CDF). The reference-gain CDF is
// expanded with the binomial and multinomial theorems, which reduces the
// outage to products of single-interferer expectations
//   E{Omega_t} = E_{G,R}{ exp(-n beta r0^alpha G R^-alpha) (G R^-alpha)^t }.
// Internally every E{Omega_t} is carried in the scaled form
//   (beta r0^alpha)^t E{Omega_t},
// which absorbs the (beta r0^alpha)^j factor of the expansion.

#include <cmath>
#include <cstdio>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "finnet/channel.hpp"
#include "finnet/errors.hpp"
#include "finnet/geometry.hpp"
#include "finnet/quadrature.hpp"
#include "finnet/scenario.hpp"
#include "finnet/specfun.hpp"

namespace finnet {

struct RlpgOptions {
  double rel_tol = 1e-11;
  // Evaluate the constant-angle core of the distance density in closed form.
  bool closed_form_core = true;
};

namespace detail {

// Per-distance factor of the scaled expectation, with y = beta r0^alpha r^-alpha:
//   Gamma(m+t)/Gamma(m) (y/m)^t (1 + n y / m)^-(m+t).
struct OmegaKernel {
  int t;
  double m;
  double n;
  double alpha;
  double log_b;  // log(beta r0^alpha)
  double log_gamma_ratio;

  OmegaKernel(int t_, double m_, double n_, double alpha_, double r0, double beta)
      : t(t_), m(m_), n(n_), alpha(alpha_), log_b(std::log(beta) + alpha_ * std::log(r0)),
        log_gamma_ratio(std::lgamma(m_ + t_) - std::lgamma(m_)) {}

  // log(1 + n y / m), also returning log y.
  double log1p_u(double r, double& log_y) const {
    log_y = log_b - alpha * std::log(r);
    const double lu = std::log(n / m) + log_y;
    return lu > 0.0 ? lu + std::log1p(std::exp(-lu)) : std::log1p(std::exp(lu));
  }

  double value(double r) const {
    if (r <= 0.0) return t == 0 ? 1.0 : 0.0;
    double ly = 0.0;
    const double l = log1p_u(r, ly);
    return std::exp(log_gamma_ratio + t * (ly - std::log(m)) - (m + t) * l);
  }

  // 1 - value(r) for t = 0.
  double complement(double r) const {
    if (r <= 0.0) return 1.0;
    double ly = 0.0;
    const double l = log1p_u(r, ly);
    return -std::expm1(-m * l);
  }
};

// log of the scaled closed-form contribution of a constant-angle piece
// f_R = theta r / |A| on [0, upsilon].
inline double log_scaled_psi(double theta, double upsilon, int tau, double m, double n, double alpha, double r0,
                             double beta, double area) {
  const double log_b = std::log(beta) + alpha * std::log(r0);
  const double e = 2.0 + alpha * m;
  const double z = -m * std::exp(alpha * std::log(upsilon) - log_b) / n;
  const double f = hyp2f1(2.0 / alpha + m, m + tau, 1.0 + 2.0 / alpha + m, z);
  if (!(f > 0.0) || !std::isfinite(f)) throw NumericFailure("psi: hypergeometric factor is not positive");
  return std::log(theta) + m * std::log(m) - m * log_b - (m + tau) * std::log(n) + e * std::log(upsilon) +
         std::lgamma(m + tau) - std::lgamma(m) - std::log(area) - std::log(e) + std::log(f);
}

}  // namespace detail

// Closed-form E{Omega_tau} restricted to a piece of the distance density where
// f_R(r) = theta r / |A| on [0, upsilon]. The 2F1 argument is -m upsilon^alpha / (beta r0^alpha m0).
// Throws NumericFailure when the hypergeometric evaluation is not available.
inline double psi_closed_form(double theta, double upsilon, int tau, double m, double m0, double alpha, double r0,
                              double beta, double area) {
  if (upsilon < 0.0) throw InvalidParameter("upsilon must be non-negative");
  if (tau < 0) throw InvalidParameter("tau must be non-negative");
  if (upsilon == 0.0 || theta == 0.0) return 0.0;
  const double log_b = std::log(beta) + alpha * std::log(r0);
  return std::exp(detail::log_scaled_psi(theta, upsilon, tau, m, m0, alpha, r0, beta, area) - tau * log_b);
}

// Scaled expectation (beta r0^alpha)^t E{Omega_t} for interference rate n.
inline double scaled_expectation_omega(const DistanceProfile& profile, int t, double m, double n, double alpha,
                                       double r0, double beta, const RlpgOptions& opt = {}) {
  if (t < 0) throw InvalidParameter("t must be non-negative");
  if (!(beta > 0.0) || !(r0 > 0.0) || !(n > 0.0) || !(m > 0.0)) {
    throw InvalidParameter("expectation needs beta, r0, n, m > 0");
  }
  const detail::OmegaKernel k(t, m, n, alpha, r0, beta);
  const quad::Options qo{opt.rel_tol, 1e-300, 4000};
  auto direct = [&](std::span<const double> pts) {
    if (t == 0) {
      auto f = [&](double r) { return k.complement(r) * profile.pdf(r); };
      return quad::require(quad::integrate_pieces(f, pts, qo), qo, "E{Omega_0}");
    }
    auto f = [&](double r) { return k.value(r) * profile.pdf(r); };
    return quad::require(quad::integrate_pieces(f, pts, qo), qo, "E{Omega_t}");
  };
  const std::vector<double> all = profile.panels();
  if (opt.closed_form_core && profile.core_radius() > 0.0) {
    const double ups = profile.core_radius();
    const double theta = profile.core_angle();
    double core = 0.0;
    bool ok = true;
    try {
      core = std::exp(detail::log_scaled_psi(theta, ups, t, m, n, alpha, r0, beta, profile.area()));
    } catch (const NumericFailure&) {
      ok = false;
    }
    if (ok) {
      const std::span<const double> rest(all.begin() + 1, all.end());
      if (t == 0) {
        const double core_mass = theta * ups * ups / (2.0 * profile.area());
        return core + (1.0 - core_mass) - direct(rest);
      }
      return core + direct(rest);
    }
  }
  return t == 0 ? 1.0 - direct(all) : direct(all);
}

// E{Omega_t} for a Nakagami interferer channel (shape m) and reference shape m0.
inline double expectation_omega(const DistanceProfile& profile, int t, double m, double m0, double alpha, double r0,
                                double beta, const RlpgOptions& opt = {}) {
  const double s = scaled_expectation_omega(profile, t, m, m0, alpha, r0, beta, opt);
  return std::exp(std::log(s) - t * (std::log(beta) + alpha * std::log(r0)));
}

// Scaled expectations for t = 0..t_max at one interference rate n.
struct OmegaExpectationTable {
  double rate = 1.0;
  std::vector<double> scaled;  // (beta r0^alpha)^t E{Omega_t}
  std::vector<double> values;  // E{Omega_t}
  std::string fingerprint;
};

inline std::string omega_fingerprint(const DistanceProfile& profile, double m, double n, double alpha, double r0,
                                     double beta) {
  char buf[256];
  const Point y = profile.reference();
  std::snprintf(buf, sizeof buf, "area=%.17g rmax=%.17g y0=(%.17g,%.17g) m=%.17g n=%.17g alpha=%.17g r0=%.17g beta=%.17g",
                profile.area(), profile.r_max(), y.x, y.y, m, n, alpha, r0, beta);
  return buf;
}

inline OmegaExpectationTable omega_table(const DistanceProfile& profile, int t_max, double m, double n, double alpha,
                                         double r0, double beta, const RlpgOptions& opt = {}) {
  OmegaExpectationTable tab;
  tab.rate = n;
  tab.fingerprint = omega_fingerprint(profile, m, n, alpha, r0, beta);
  const double log_b = std::log(beta) + alpha * std::log(r0);
  for (int t = 0; t <= t_max; ++t) {
    const double s = scaled_expectation_omega(profile, t, m, n, alpha, r0, beta, opt);
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw NumericFailure("E{Omega_" + std::to_string(t) + "} is not positive (" + std::to_string(s) + ")");
    }
    tab.scaled.push_back(s);
    tab.values.push_back(std::exp(std::log(s) - t * log_b));
  }
  if (tab.scaled[0] > 1.0 + 1e-12) throw NumericFailure("E{Omega_0} exceeds one");
  return tab;
}

// sum over compositions t_1 + ... + t_M = j of j!/(t_1!...t_M!) prod scaled[t_i],
// collapsed onto partitions of j.
inline double composition_sum(std::span<const double> scaled, int j, int M) {
  if (M == 0) return j == 0 ? 1.0 : 0.0;
  double sum = 0.0;
  for (const PartitionTerm& p : cached_partitions(j, M)) {
    const int k = static_cast<int>(p.parts.size());
    double prod = static_cast<double>(p.multinomial_weight) * static_cast<double>(p.arrangement_count);
    prod *= std::pow(scaled[0], M - k);
    for (int t : p.parts) prod *= scaled[t];
    sum += prod;
  }
  return sum;
}

// Probability of success (1 - epsilon) contributed by the terms of one rate n:
//   e^{-n x} sum_k a_k sum_j C(k, j) x^{k-j} composition_sum(j), x = beta / rho0.
inline double success_terms(const OmegaExpectationTable& tab, std::span<const GeneralFadingCdf::Term> terms, int M,
                            double x) {
  double out = 0.0;
  for (const auto& term : terms) {
    if (term.k >= static_cast<int>(tab.scaled.size())) throw InvalidParameter("expectation table too short");
    double inner = 0.0;
    for (int j = 0; j <= term.k; ++j) {
      inner += static_cast<double>(detail::binomial(term.k, j)) * std::pow(x, term.k - j) *
               composition_sum(tab.scaled, j, M);
    }
    out += term.a * inner;
  }
  return std::exp(-tab.rate * x) * out;
}

namespace detail {

inline void require_integer_m0(double m0) {
  if (!(m0 >= 1.0) || m0 != std::floor(m0)) {
    throw Unsupported("the RLPG framework needs an integer m0 (got " + std::to_string(m0) +
                      "); use the MGF framework (method \"mgf\") instead");
  }
}

inline OutageResult finish_rlpg(double success, double tol) {
  OutageResult out;
  out.method = Method::Rlpg;
  out.tolerance = tol;
  out.epsilon = clamp_probability(1.0 - success, out.warnings);
  return out;
}

}  // namespace detail

// Reusable evaluator: the expectation table does not depend on M.
class RlpgEngine {
 public:
  explicit RlpgEngine(const Scenario& sc, const RlpgOptions& opt = {}) : sc_(sc) {
    sc_.validate();
    detail::require_integer_m0(sc_.channel.m0);
    cdf_ = nakagami_as_general_cdf(sc_.channel.m0);
    const DistanceProfile profile(sc_.region, sc_.receiver);
    table_ = omega_table(profile, static_cast<int>(sc_.channel.m0) - 1, sc_.channel.m, sc_.channel.m0, sc_.alpha,
                         sc_.r0, sc_.beta, opt);
    tol_ = 100.0 * opt.rel_tol;
  }

  OutageResult outage(int M) const {
    if (M < 0) throw InvalidParameter("M must be non-negative");
    return detail::finish_rlpg(success_terms(table_, cdf_.terms, M, sc_.beta / sc_.rho0), tol_);
  }

  OutageResult outage() const { return outage(sc_.interferers); }
  const OmegaExpectationTable& table() const { return table_; }

 private:
  Scenario sc_;
  GeneralFadingCdf cdf_;
  OmegaExpectationTable table_;
  double tol_ = 0.0;
};

inline OutageResult outage_rlpg(const Scenario& sc, const RlpgOptions& opt = {}) {
  return RlpgEngine(sc, opt).outage();
}

// Receiver at the centre of a disk of radius W: every expectation is a single
// closed-form term (quadrature only if the hypergeometric evaluation fails).
inline OutageResult outage_disk_center(double w, double r0, int M, double m0, double m, double alpha, double beta,
                                       double rho0, const RlpgOptions& opt = {}) {
  if (!(w > 0.0)) throw InvalidParameter("W must be positive");
  detail::require_integer_m0(m0);
  NakagamiChannel(m0, m).validate();
  if (M < 0 || !(r0 > 0.0) || !(beta > 0.0) || !(rho0 > 0.0)) throw InvalidParameter("invalid disk-centre inputs");
  const double area = kPi * w * w;
  const int tmax = static_cast<int>(m0) - 1;
  OmegaExpectationTable tab;
  tab.rate = m0;
  for (int t = 0; t <= tmax; ++t) {
    double s = 0.0;
    try {
      s = std::exp(detail::log_scaled_psi(kTwoPi, w, t, m, m0, alpha, r0, beta, area));
    } catch (const NumericFailure&) {
      const detail::OmegaKernel k(t, m, m0, alpha, r0, beta);
      const quad::Options qo{opt.rel_tol, 1e-300, 4000};
      auto f = [&](double r) { return k.value(r) * kTwoPi * r / area; };
      const double pts[] = {0.0, w};
      s = quad::require(quad::integrate_pieces(f, pts, qo), qo, "disk-centre expectation");
    }
    tab.scaled.push_back(s);
  }
  const auto cdf = nakagami_as_general_cdf(m0);
  return detail::finish_rlpg(success_terms(tab, cdf.terms, M, beta / rho0), 100.0 * opt.rel_tol);
}

// Reference link with an exponential-polynomial CDF, interferers Nakagami(sc.channel.m).
// sc.channel.m0 is ignored.
inline OutageResult outage_general_family(const Scenario& sc, const GeneralFadingCdf& cdf,
                                          const RlpgOptions& opt = {}) {
  Scenario probe = sc;
  probe.channel.m0 = 1.0;
  probe.validate();
  cdf.validate();
  const DistanceProfile profile(sc.region, sc.receiver);
  std::map<int, std::vector<GeneralFadingCdf::Term>> by_rate;
  for (const auto& t : cdf.terms) by_rate[t.n].push_back(t);
  double success = 0.0;
  for (const auto& [n, terms] : by_rate) {
    int kmax = 0;
    for (const auto& t : terms) kmax = std::max(kmax, t.k);
    const auto tab = omega_table(profile, kmax, sc.channel.m, n, sc.alpha, sc.r0, sc.beta, opt);
    success += success_terms(tab, terms, sc.interferers, sc.beta / sc.rho0);
  }
  return detail::finish_rlpg(success, 100.0 * opt.rel_tol);
}

}  // namespace finnet
