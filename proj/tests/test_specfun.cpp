#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <random>

#include "finnet/quadrature.hpp"
#include "finnet/specfun.hpp"

using namespace finnet;
using cplx = std::complex<double>;

namespace {

// Series for the regularized lower incomplete gamma, independent of the library backing.
double lower_gamma_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int k = 1; k < 2000; ++k) {
    term *= x / (a + k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return std::exp(a * std::log(x) - x - std::lgamma(a)) * sum;
}

// Euler integral 2F1(a,b;c;z) = G(c)/(G(b)G(c-b)) int_0^1 t^(b-1) (1-t)^(c-b-1) (1-zt)^(-a) dt, c > b > 0.
cplx hyp2f1_euler(double a, double b, double c, cplx z) {
  auto f = [&](double t) -> cplx {
    if (t <= 0.0 || t >= 1.0) return {};
    return std::pow(t, b - 1.0) * std::pow(1.0 - t, c - b - 1.0) * std::pow(1.0 - z * t, -a);
  };
  const double pts[] = {0.0, 0.5, 1.0};
  const auto r = quad::integrate_pieces(f, pts, {1e-13, 1e-300, 8000});
  return r.value * std::exp(std::lgamma(c) - std::lgamma(b) - std::lgamma(c - b));
}

void enumerate_compositions(int j, int slots, std::vector<int>& cur, const std::function<void()>& visit) {
  if (static_cast<int>(cur.size()) == slots - 1) {
    cur.push_back(j);
    visit();
    cur.pop_back();
    return;
  }
  for (int t = 0; t <= j; ++t) {
    cur.push_back(t);
    enumerate_compositions(j - t, slots, cur, visit);
    cur.pop_back();
  }
}

std::uint64_t fact(int n) { return n <= 1 ? 1 : n * fact(n - 1); }

}  // namespace

TEST(LnGamma, KnownValues) {
  EXPECT_EQ(ln_gamma(1.0), 0.0);
  EXPECT_NEAR(ln_gamma(2.0), 0.0, 1e-15);
  EXPECT_NEAR(ln_gamma(0.5), 0.5 * std::log(std::acos(-1.0)), 1e-15);
  // 50-digit reference value.
  EXPECT_NEAR(ln_gamma(7.3), 7.1478925230222490327770571544283892, 7.15 * 1e-13);
  EXPECT_THROW(ln_gamma(0.0), DomainError);
  EXPECT_THROW(ln_gamma(-2.5), DomainError);
}

TEST(LnGamma, Recurrence) {
  for (int i = 0; i <= 499; ++i) {
    const double x = 0.1 + i * (49.9 / 499.0);
    EXPECT_NEAR(ln_gamma(x + 1.0) - ln_gamma(x) - std::log(x), 0.0, 1e-12) << x;
  }
}

TEST(IncompleteGamma, KnownValues) {
  EXPECT_EQ(upper_incomplete_gamma_regularized(2.5, 0.0), 1.0);
  for (double t : {0.1, 1.0, 3.3, 20.0}) {
    EXPECT_NEAR(upper_incomplete_gamma_regularized(1.0, t), std::exp(-t), 1e-15);
  }
  EXPECT_NEAR(upper_incomplete_gamma_regularized(2.5, 3.7), 0.19255043307939575501103525151718, 1e-14);
  EXPECT_NEAR(lower_incomplete_gamma_regularized(4.0, 5.2), 0.76193450127687578655895218191744, 1e-14);
  EXPECT_THROW(upper_incomplete_gamma_regularized(0.0, 1.0), DomainError);
  EXPECT_THROW(upper_incomplete_gamma_regularized(1.0, -1.0), DomainError);
}

TEST(IncompleteGamma, MatchesSeries) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ua(0.2, 12.0);
  std::uniform_real_distribution<double> ux(0.0, 25.0);
  for (int i = 0; i < 300; ++i) {
    const double a = ua(rng);
    const double x = ux(rng);
    const double p = lower_gamma_series(a, x);
    EXPECT_NEAR(lower_incomplete_gamma_regularized(a, x), p, 1e-12);
    EXPECT_NEAR(upper_incomplete_gamma_regularized(a, x), 1.0 - p, 1e-12);
  }
}

TEST(Hyp2f1, Identities) {
  EXPECT_EQ(hyp2f1(1.3, 2.7, 3.1, cplx{0.0, 0.0}), cplx(1.0, 0.0));
  EXPECT_NEAR(hyp2f1(1.0, 1.0, 2.0, -3.0), std::log(4.0) / 3.0, 1e-14);
  for (double z : {-0.4, -2.0, 0.3, 0.9, 0.97}) {
    EXPECT_NEAR(hyp2f1(1.0, 1.0, 2.0, z), -std::log1p(-z) / z, 1e-12 * std::abs(std::log1p(-z) / z)) << z;
  }
  // a = b with |z| well beyond 1: both 1/z terms are singular, callers must fall back.
  for (double z : {-30.0, -1e4}) EXPECT_THROW(hyp2f1(1.0, 1.0, 2.0, z), NumericFailure) << z;
  // (1 - z)^-a = 2F1(a, b; b; z).
  for (double z : {-0.7, -5.0, -123.0}) {
    EXPECT_NEAR(hyp2f1(0.75, 1.6, 1.6, z), std::pow(1.0 - z, -0.75), 1e-12 * std::pow(1.0 - z, -0.75));
  }
  // Complex argument against log identity.
  const cplx z{-4.0, 3.0};
  const cplx ref = -std::log(1.0 - z) / z;
  EXPECT_LT(std::abs(hyp2f1(1.0, 1.0, 2.0, z) - ref), 1e-12 * std::abs(ref));
  EXPECT_THROW(hyp2f1(1.0, 1.0, -2.0, 0.5), DomainError);
  EXPECT_THROW(hyp2f1(1.0, 1.0, 2.0, 1.5), DomainError);
}

TEST(Hyp2f1, InterferencePattern) {
  const double m = 2.5;
  const double alpha = 3.0;
  const double a = m;
  const double b = 2.0 / alpha + m;
  const double c = 1.0 + 2.0 / alpha + m;
  const double ref = 0.0021961164942587165220771944665551;  // 50-digit reference
  EXPECT_NEAR(hyp2f1(a, b, c, -17.3), ref, 1e-10 * ref);
  EXPECT_NEAR(hyp2f1_euler(a, b, c, -17.3).real(), ref, 1e-10 * ref);
}

TEST(Hyp2f1, MatchesEulerIntegral) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> um(0.5, 4.0);
  std::uniform_real_distribution<double> ual(2.1, 6.0);
  std::uniform_real_distribution<double> ux(-3.0, 3.0);
  for (int i = 0; i < 60; ++i) {
    const double m = um(rng);
    const double alpha = ual(rng);
    const double a = m;
    const double b = 2.0 / alpha + m;
    const double c = 1.0 + b;
    cplx z;
    if (i % 2 == 0) {
      z = -std::pow(10.0, ux(rng));
    } else {
      // The MGF pattern: -g0 m v^alpha / (r0^alpha s) with Re(s) > 0 keeps z off the cut.
      const cplx s{1.0, 4.0 * ux(rng)};
      z = -std::pow(10.0, ux(rng)) / s;
    }
    const cplx got = hyp2f1(a, b, c, z);
    const cplx ref = hyp2f1_euler(a, b, c, z);
    EXPECT_LT(std::abs(got - ref), 1e-10 * std::abs(ref)) << "m=" << m << " alpha=" << alpha << " z=" << z;
  }
}

TEST(Hyp2f1, ContiguousRelationResidual) {
  // (c - a) F(a-1) + (2a - c + (b - a) z) F(a) + a (z - 1) F(a+1) = 0.
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ua(1.2, 5.0);
  std::uniform_real_distribution<double> ub(0.3, 5.0);
  std::uniform_real_distribution<double> uc(0.5, 7.0);
  std::uniform_real_distribution<double> ux(-2.5, 1.5);
  std::uniform_real_distribution<double> uy(-1.0, 1.0);
  int checked = 0;
  while (checked < 200) {
    const double a = ua(rng);
    const double b = ub(rng);
    const double c = uc(rng);
    const double lz = ux(rng);
    cplx z = checked % 2 == 0 ? cplx(-std::pow(10.0, lz), 0.0) : -std::pow(10.0, lz) * cplx(1.0, uy(rng));
    // Skip near-integer parameter differences, where transformation formulas are degenerate.
    auto near_int = [](double x) { return std::abs(x - std::round(x)) < 0.02; };
    if (near_int(b - a) || near_int(b - a + 1.0) || near_int(c - a - b)) continue;
    const cplx f0 = hyp2f1(a - 1.0, b, c, z);
    const cplx f1 = hyp2f1(a, b, c, z);
    const cplx f2 = hyp2f1(a + 1.0, b, c, z);
    const cplx t0 = (c - a) * f0;
    const cplx t1 = (2.0 * a - c + (b - a) * z) * f1;
    const cplx t2 = a * (z - 1.0) * f2;
    const double scale = std::max({std::abs(t0), std::abs(t1), std::abs(t2)});
    EXPECT_LT(std::abs(t0 + t1 + t2), 1e-9 * scale) << a << " " << b << " " << c << " " << z;
    ++checked;
  }
}

TEST(Partitions, SmallCases) {
  const auto zero = enumerate_weighted_partitions(0, 5);
  ASSERT_EQ(zero.size(), 1u);
  EXPECT_TRUE(zero[0].parts.empty());
  EXPECT_EQ(zero[0].arrangement_count, 1u);
  EXPECT_EQ(zero[0].multinomial_weight, 1u);

  const auto two = enumerate_weighted_partitions(2, 3);
  ASSERT_EQ(two.size(), 2u);
  std::uint64_t total = 0;
  for (const auto& p : two) total += p.arrangement_count;
  EXPECT_EQ(total, 6u);

  std::uint64_t total4 = 0;
  for (const auto& p : enumerate_weighted_partitions(4, 10)) total4 += p.arrangement_count;
  EXPECT_EQ(total4, 715u);
  EXPECT_THROW(enumerate_weighted_partitions(-1, 2), InvalidParameter);
  EXPECT_THROW(enumerate_weighted_partitions(2, 0), InvalidParameter);
}

TEST(Partitions, CountsMatchBruteForce) {
  for (int j = 0; j <= 7; ++j) {
    for (int M = 1; M <= 8; ++M) {
      std::map<std::vector<int>, std::uint64_t> brute;
      std::vector<int> cur;
      enumerate_compositions(j, M, cur, [&] {
        std::vector<int> key;
        for (int t : cur) {
          if (t > 0) key.push_back(t);
        }
        std::sort(key.rbegin(), key.rend());
        ++brute[key];
      });
      const auto parts = enumerate_weighted_partitions(j, M);
      ASSERT_EQ(parts.size(), brute.size());
      for (const auto& p : parts) {
        int sum = 0;
        for (int t : p.parts) sum += t;
        EXPECT_EQ(sum, j);
        EXPECT_LE(static_cast<int>(p.parts.size()), M);
        EXPECT_EQ(p.arrangement_count, brute.at(p.parts));
        std::uint64_t den = 1;
        for (int t : p.parts) den *= fact(t);
        EXPECT_EQ(p.multinomial_weight, fact(j) / den);
      }
    }
  }
}

TEST(Partitions, CollapseEqualsCompositionSum) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> val(1, 9);
  for (int j = 0; j <= 6; ++j) {
    for (int M = 1; M <= 8; ++M) {
      for (int rep = 0; rep < 20; ++rep) {
        std::vector<std::int64_t> f(j + 1);
        for (auto& x : f) x = val(rng);
        // Integer arithmetic on both sides: the match must be exact.
        std::int64_t naive = 0;
        std::vector<int> cur;
        enumerate_compositions(j, M, cur, [&] {
          std::int64_t term = static_cast<std::int64_t>(fact(j));
          for (int t : cur) term = term / static_cast<std::int64_t>(fact(t));
          for (int t : cur) term *= f[t];
          naive += term;
        });
        std::int64_t collapsed = 0;
        for (const auto& p : cached_partitions(j, M)) {
          std::int64_t term = static_cast<std::int64_t>(p.multinomial_weight * p.arrangement_count);
          for (int i = 0; i < M - static_cast<int>(p.parts.size()); ++i) term *= f[0];
          for (int t : p.parts) term *= f[t];
          collapsed += term;
        }
        EXPECT_EQ(collapsed, naive) << "j=" << j << " M=" << M;
      }
    }
  }
}
