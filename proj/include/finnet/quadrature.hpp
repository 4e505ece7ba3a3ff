#pragma once

// Globally adaptive Gauss-Kronrod (10/21 point) integration for real and
// complex valued integrands, with QUADPACK-style error estimation.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "finnet/errors.hpp"

namespace finnet::quad {

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_intervals = 4000;
  // Also accept error <= l1_rel_tol * integral of |f|, for oscillatory integrands whose
  // value is much smaller than their magnitude.
  double l1_rel_tol = 0.0;
};

template <class T>
struct Result {
  T value{};
  double error = 0.0;
  double magnitude = 0.0;  // estimate of the integral of |f|
  int evaluations = 0;
  bool converged = false;
};

template <class T>
double target_error(const Result<T>& r, const Options& opt) {
  return std::max({opt.abs_tol, opt.rel_tol * std::abs(r.value), opt.l1_rel_tol * r.magnitude});
}

namespace detail {

// Kronrod abscissae on [0,1]; odd indices are the 10-point Gauss nodes.
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208980178865, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <class T>
struct Panel {
  int piece = 0;
  double a = 0.0;
  double b = 0.0;
  T value{};
  double error = 0.0;
  double magnitude = 0.0;
};

template <class T>
bool is_finite(const T& v) {
  if constexpr (std::is_floating_point_v<T>) {
    return std::isfinite(v);
  } else {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  }
}

// One 21-point Kronrod rule on [a,b]; error estimate as in QUADPACK qk21.
template <class T, class F>
Panel<T> kronrod21(F& f, int piece, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<T, 21> fv;
  fv[10] = f(piece, center);
  T resk = fv[10] * kWgk[10];
  T resg{};
  double resabs = std::abs(fv[10]) * kWgk[10];
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    fv[j] = f(piece, center - dx);
    fv[20 - j] = f(piece, center + dx);
    resk += (fv[j] + fv[20 - j]) * kWgk[j];
    resabs += (std::abs(fv[j]) + std::abs(fv[20 - j])) * kWgk[j];
    if (j % 2 == 1) resg += (fv[j] + fv[20 - j]) * kWg[j / 2];
  }
  const T mean = resk * 0.5;
  double resasc = kWgk[10] * std::abs(fv[10] - mean);
  for (int j = 0; j < 10; ++j) {
    resasc += kWgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[20 - j] - mean));
  }
  const double ah = std::abs(half);
  resasc *= ah;
  resabs *= ah;
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * resabs, err);
  }
  Panel<T> p{piece, a, b, resk * half, err, resabs};
  if (!is_finite(p.value) || !std::isfinite(p.error)) {
    throw NumericFailure("quadrature: non-finite integrand value on [" + std::to_string(a) + ", " +
                         std::to_string(b) + "]");
  }
  return p;
}

// f(piece, x) integrated over every piece; panels start as the pieces themselves.
template <class T, class F>
Result<T> adaptive(F&& f, std::span<const std::pair<double, double>> pieces, const Options& opt) {
  auto cmp = [](const Panel<T>& l, const Panel<T>& r) { return l.error < r.error; };
  std::priority_queue<Panel<T>, std::vector<Panel<T>>, decltype(cmp)> heap(cmp);
  Result<T> res;
  int count = 0;
  T value{};
  double error = 0.0;
  double magnitude = 0.0;
  auto target = [&] { return std::max({opt.abs_tol, opt.rel_tol * std::abs(value), opt.l1_rel_tol * magnitude}); };
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (pieces[i].second == pieces[i].first) continue;
    Panel<T> p = kronrod21<T>(f, static_cast<int>(i), pieces[i].first, pieces[i].second);
    value += p.value;
    error += p.error;
    magnitude += p.magnitude;
    heap.push(p);
    res.evaluations += 21;
    ++count;
  }
  while (!heap.empty() && error > target()) {
    if (count >= opt.max_intervals) break;
    Panel<T> worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    heap.pop();
    Panel<T> left = kronrod21<T>(f, worst.piece, worst.a, mid);
    Panel<T> right = kronrod21<T>(f, worst.piece, mid, worst.b);
    res.evaluations += 42;
    ++count;
    value += (left.value + right.value) - worst.value;
    error += (left.error + right.error) - worst.error;
    magnitude += (left.magnitude + right.magnitude) - worst.magnitude;
    heap.push(left);
    heap.push(right);
  }
  // Final sum in a fixed (position) order so results do not depend on heap layout.
  std::vector<Panel<T>> all;
  all.reserve(heap.size());
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel<T>& l, const Panel<T>& r) {
    return l.piece != r.piece ? l.piece < r.piece : l.a < r.a;
  });
  res.value = T{};
  res.error = 0.0;
  for (const auto& p : all) {
    res.value += p.value;
    res.error += p.error;
    res.magnitude += p.magnitude;
  }
  res.converged = res.error <= target_error(res, opt);
  return res;
}

}  // namespace detail

template <class F>
using value_of = std::invoke_result_t<F&, double>;

// Integrate f over [a,b].
template <class F>
Result<value_of<F>> integrate(F&& f, double a, double b, const Options& opt = {}) {
  using T = value_of<F>;
  std::array<std::pair<double, double>, 1> piece{{{a, b}}};
  auto g = [&f](int, double x) -> T { return f(x); };
  return detail::adaptive<T>(g, piece, opt);
}

// Integrate f over [pts.front(), pts.back()], split at every interior point.
// With smooth_ends, each piece is mapped through x = a + (b-a) u^2 (3 - 2u),
// which removes square-root type endpoint behaviour (arccos kinks at breakpoints).
template <class F>
Result<value_of<F>> integrate_pieces(F&& f, std::span<const double> pts, const Options& opt = {},
                                     bool smooth_ends = true) {
  using T = value_of<F>;
  if (pts.size() < 2) return Result<T>{T{}, 0.0, 0, true};
  std::vector<std::pair<double, double>> pieces;
  pieces.reserve(pts.size() - 1);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (smooth_ends) {
      pieces.emplace_back(0.0, 1.0);
    } else {
      pieces.emplace_back(pts[i], pts[i + 1]);
    }
  }
  if (!smooth_ends) {
    auto g = [&f](int, double x) -> T { return f(x); };
    return detail::adaptive<T>(g, pieces, opt);
  }
  auto g = [&f, pts](int piece, double u) -> T {
    const double a = pts[piece];
    const double len = pts[piece + 1] - a;
    const double x = a + len * u * u * (3.0 - 2.0 * u);
    const double jac = len * 6.0 * u * (1.0 - u);
    if (jac == 0.0) return T{};
    return f(x) * jac;
  };
  return detail::adaptive<T>(g, pieces, opt);
}

// Throws NumericFailure unless the estimate met its tolerance (allowing a small slack
// for round-off limited integrands).
template <class T>
T require(const Result<T>& r, const Options& opt, const char* what) {
  const double target = target_error(r, opt);
  if (!r.converged && r.error > 100.0 * target) {
    char buf[96];
    std::snprintf(buf, sizeof buf, " (error estimate %.3e, target %.3e)", r.error, target);
    throw NumericFailure(std::string(what) + ": quadrature did not converge" + buf);
  }
  return r.value;
}

}  // namespace finnet::quad
