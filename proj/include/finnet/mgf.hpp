#pragma once

// Outage probability through numerical Laplace inversion of the CDF of
//   Z = 1/(rho0 G0) + I / (r0^-alpha G0),   epsilon = 1 - F_Z(1/beta).
// The transform of Z is an integral over G0 of the noise factor times the
// M-th power of the per-interferer expectation, which in turn is an integral
// over the distance density.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "finnet/errors.hpp"
#include "finnet/geometry.hpp"
#include "finnet/quadrature.hpp"
#include "finnet/scenario.hpp"
#include "finnet/specfun.hpp"

namespace finnet {

// Euler-summation parameters: discretisation A, binomial order B, truncation C.
struct EulerInversionParams {
  double A = 8.0 * std::numbers::ln10;
  int B = 11;
  int C = 14;

  // Smallest parameters meeting a target accuracy of 10^-zeta.
  static EulerInversionParams for_accuracy(double zeta) {
    if (!(zeta > 0.0)) throw InvalidParameter("accuracy exponent must be positive");
    EulerInversionParams p;
    p.A = zeta * std::numbers::ln10;
    p.B = static_cast<int>(std::ceil(1.243 * zeta - 1.0));
    p.C = static_cast<int>(std::ceil(1.467 * zeta));
    p.B = std::max(p.B, 1);
    return p;
  }

  void validate() const {
    if (!(A > 0.0) || B < 1 || C < 1) throw InvalidParameter("Euler parameters need A > 0, B >= 1, C >= 1");
  }

  // Nominal accuracy exponent implied by A.
  double zeta() const { return A / std::numbers::ln10; }
};

// Inverts a Laplace transform fhat(s) at t > 0:
//   f(t) ~ 2^-B e^(A/2) / t  sum_b C(B,b) sum_{c=0}^{C+b} (-1)^c / D_c  Re fhat((A + 2 pi i c) / (2t)),
// with D_0 = 2 and D_c = 1 otherwise. fhat is evaluated once per distinct c.
template <class F>
double euler_invert(F&& fhat, double t, const EulerInversionParams& p) {
  p.validate();
  if (!(t > 0.0)) throw InvalidParameter("Laplace inversion point must be positive");
  const int n = p.B + p.C;
  std::vector<double> re(n + 1);
  for (int c = 0; c <= n; ++c) {
    const cplx s{p.A / (2.0 * t), std::numbers::pi * c / t};
    const cplx v = fhat(s);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw NumericFailure("Laplace inversion: transform is not finite at c = " + std::to_string(c));
    }
    re[c] = v.real();
  }
  // Partial sums S_k = sum_{c<=k} (-1)^c / D_c re[c], then the binomial average of S_C..S_{C+B}.
  std::vector<double> partial(n + 1);
  double acc = 0.0;
  for (int c = 0; c <= n; ++c) {
    const double term = (c % 2 == 0 ? 1.0 : -1.0) * re[c] / (c == 0 ? 2.0 : 1.0);
    acc += term;
    partial[c] = acc;
  }
  double avg = 0.0;
  double binom = 1.0;
  for (int b = 0; b <= p.B; ++b) {
    avg += binom * partial[p.C + b];
    binom = binom * (p.B - b) / (b + 1.0);
  }
  return std::ldexp(avg, -p.B) * std::exp(0.5 * p.A) / t;
}

// CDF at z from the transform of the density, using L_F(s) = L_f(s) / s.
template <class F>
double euler_invert_cdf(F&& laplace_of_pdf, double z, const EulerInversionParams& p) {
  return euler_invert([&laplace_of_pdf](cplx s) { return cplx(laplace_of_pdf(s)) / s; }, z, p);
}

namespace detail {

// log(1 + z), accurate for small |z|.
inline cplx log1p_c(cplx z) {
  if (std::abs(z) < 0.5) {
    const double x = z.real();
    const double y = z.imag();
    return {0.5 * std::log1p(2.0 * x + x * x + y * y), std::atan2(y, 1.0 + x)};
  }
  return std::log(1.0 + z);
}

// exp(z) - 1, accurate for small |z|.
inline cplx expm1_c(cplx z) {
  const double em = std::expm1(z.real());
  const double sh = std::sin(0.5 * z.imag());
  return {em * std::cos(z.imag()) - 2.0 * sh * sh, (em + 1.0) * std::sin(z.imag())};
}

// log(1 + q r^-alpha) for Re(q) >= 0, without overflow as r -> 0.
inline cplx log1p_power(cplx q, double r, double alpha) {
  const double lr = std::log(r);
  const double lx = std::log(std::abs(q)) - alpha * lr;
  if (lx <= 0.0) return log1p_c(q * std::exp(-alpha * lr));
  const cplx lq = std::log(q);
  return lq - alpha * lr + log1p_c(std::exp(alpha * lr - lq));
}

}  // namespace detail

struct MgfOptions {
  EulerInversionParams euler;
  double inner_rel_tol = 1e-11;
  double outer_rel_tol = 1e-11;
};

// One minus the per-interferer expectation,
//   1 - E_{G,R}{ exp(-s G R^-alpha / (r0^-alpha g0)) }
//   = int_0^rmax [1 - (1 + r0^alpha s r^-alpha / (g0 m))^-m] f_R(r) dr.
inline cplx inner_expectation_complement(const DistanceProfile& profile, double m, double alpha, double r0, cplx s,
                                         double g0, double rel_tol = 1e-11) {
  const cplx q = std::exp(alpha * std::log(r0)) * s / (g0 * m);
  auto f = [&](double r) -> cplx {
    const double dens = profile.pdf(r);
    if (dens == 0.0) return {};
    return -detail::expm1_c(-m * detail::log1p_power(q, r, alpha)) * dens;
  };
  const auto pts = profile.panels();
  const quad::Options opt{rel_tol, 1e-300, 4000};
  const auto res = quad::integrate_pieces(f, pts, opt);
  return quad::require(res, opt, "interferer expectation");
}

// E_{G,R}{ exp(-s G R^-alpha / (r0^-alpha g0)) } for one interferer; |value| <= 1 for Re(s) >= 0.
inline cplx inner_expectation(const DistanceProfile& profile, double m, double alpha, double r0, cplx s,
                              double g0, double rel_tol = 1e-11) {
  if (!(g0 > 0.0)) throw InvalidParameter("g0 must be positive");
  if (s.real() < 0.0) throw InvalidParameter("inner expectation needs Re(s) >= 0");
  if (s == cplx{}) return {1.0, 0.0};
  return 1.0 - inner_expectation_complement(profile, m, alpha, r0, s, g0, rel_tol);
}

// Contribution of a constant-angle piece f_R(r) = theta r / |A| on [0, upsilon]
// to the interferer expectation, in closed form through 2F1.
inline cplx phi_closed_form(double theta, double upsilon, double m, double alpha, double r0, cplx s, double g0,
                            double area) {
  if (upsilon < 0.0) throw InvalidParameter("upsilon must be non-negative");
  if (upsilon == 0.0 || theta == 0.0) return {};
  const double e = 2.0 + alpha * m;
  const cplx lrs = alpha * std::log(r0) + std::log(s);  // log(r0^alpha s)
  const cplx logpre = std::log(theta) + m * std::log(m) + m * std::log(g0) + e * std::log(upsilon) -
                      std::log(area) - std::log(e) - m * lrs;
  const cplx z = -g0 * m * std::exp(alpha * std::log(upsilon) - lrs);
  return std::exp(logpre) * hyp2f1(m, 2.0 / alpha + m, 1.0 + 2.0 / alpha + m, z);
}

// Laplace transform of Z at s.
inline cplx laplace_z(const DistanceProfile& profile, const Scenario& sc, cplx s, const MgfOptions& opt) {
  const double m0 = sc.channel.m0;
  const double m = sc.channel.m;
  const double log_norm = m0 * std::log(m0) - std::lgamma(m0);
  const int M = sc.interferers;
  // g0 = u / (1 - u), dg0 = du / (1 - u)^2.
  auto f = [&](double u) -> cplx {
    if (u <= 0.0 || u >= 1.0) return {};
    const double g0 = u / (1.0 - u);
    const double log_jac = -2.0 * std::log1p(-u);
    const double log_pdf = (m0 - 1.0) * std::log(g0) - m0 * g0 + log_norm;
    cplx expo = -s / (sc.rho0 * g0) + log_pdf + log_jac;
    if (expo.real() < -745.0) return {};
    if (M > 0) {
      const cplx comp = inner_expectation_complement(profile, m, sc.alpha, sc.r0, s, g0, opt.inner_rel_tol);
      expo += static_cast<double>(M) * detail::log1p_c(-comp);
    }
    if (expo.real() < -745.0) return {};
    return std::exp(expo);
  };
  quad::Options qo{opt.outer_rel_tol, 1e-300, 4000};
  qo.l1_rel_tol = opt.outer_rel_tol;
  // Split the unit interval so the bulk of the gamma density (g0 near 1) is resolved early.
  const double pts[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  const auto res = quad::integrate_pieces(f, pts, qo, false);
  return quad::require(res, qo, "reference-gain integral");
}

inline OutageResult outage_mgf(const Scenario& sc, const MgfOptions& opt = {}) {
  sc.validate();
  const DistanceProfile profile(sc.region, sc.receiver);
  const double z = 1.0 / sc.beta;
  auto lz = [&](cplx s) { return laplace_z(profile, sc, s, opt); };
  const double cdf = euler_invert_cdf(lz, z, opt.euler);
  OutageResult out;
  out.method = Method::Mgf;
  out.tolerance = std::pow(10.0, -opt.euler.zeta());
  out.epsilon = clamp_probability(1.0 - cdf, out.warnings, 10.0 * out.tolerance);
  return out;
}

}  // namespace finnet
