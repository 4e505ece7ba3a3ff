#pragma once

// Simulation oracle: uniform node placement, Gamma power gains and SINR trials.
// Every trial draws from its own counter-based stream keyed by (seed, trial),
// so results do not depend on how trials are spread over threads.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include "finnet/errors.hpp"
#include "finnet/geometry.hpp"
#include "finnet/scenario.hpp"

namespace finnet {

// Philox4x32-10 block function.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
  }
  return ctr;
}

// Sequential uniforms from the Philox stream (seed, stream).
class PhiloxStream {
 public:
  PhiloxStream(std::uint64_t seed, std::uint64_t stream) : key_{lo(seed), hi(seed)}, stream_(stream) {}

  std::uint64_t next_u64() {
    if (pos_ == 2) refill();
    return buf_[pos_++];
  }

  // Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double standard_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double phi = kTwoPi * uniform();
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

 private:
  static std::uint32_t lo(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
  static std::uint32_t hi(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

  void refill() {
    const auto out = philox4x32({lo(block_), hi(block_), lo(stream_), hi(stream_)}, key_);
    ++block_;
    buf_[0] = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    buf_[1] = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
    pos_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buf_{};
  int pos_ = 2;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Gamma(shape, 1/shape) draw, i.e. a unit-mean Nakagami power gain.
inline double sample_unit_gamma(double shape, PhiloxStream& rng) {
  if (shape == std::floor(shape) && shape <= 32.0) {
    double s = 0.0;
    for (int i = 0; i < static_cast<int>(shape); ++i) s -= std::log(rng.uniform());
    return s / shape;
  }
  // Marsaglia-Tsang, with the shape-boost for shape < 1.
  const double a = shape < 1.0 ? shape + 1.0 : shape;
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  double g = 0.0;
  for (;;) {
    const double x = rng.standard_normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x || std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      g = d * v;
      break;
    }
  }
  if (shape < 1.0) g *= std::pow(rng.uniform(), 1.0 / shape);
  return g / shape;
}

// Exact uniform sampler: disk by sqrt(U) radius, polygon by area-weighted fan triangles.
class RegionSampler {
 public:
  explicit RegionSampler(const Region& region) : region_(region) {
    if (region_.is_disk()) return;
    const auto v = region_.polygon().vertices();
    double acc = 0.0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      acc += 0.5 * cross(v[i] - v[0], v[i + 1] - v[0]);
      cumulative_.push_back(acc);
    }
    for (double& c : cumulative_) c /= acc;
  }

  Point sample(PhiloxStream& rng) const {
    if (region_.is_disk()) {
      const Disk& d = region_.disk();
      const double r = d.radius() * std::sqrt(rng.uniform());
      const double phi = kTwoPi * rng.uniform();
      return {d.center().x + r * std::cos(phi), d.center().y + r * std::sin(phi)};
    }
    const auto v = region_.polygon().vertices();
    const double pick = rng.uniform();
    std::size_t tri = std::upper_bound(cumulative_.begin(), cumulative_.end(), pick) - cumulative_.begin();
    tri = std::min(tri, cumulative_.size() - 1);
    const Point a = v[0];
    const Point b = v[tri + 1];
    const Point c = v[tri + 2];
    const double s = std::sqrt(rng.uniform());
    const double t = rng.uniform();
    // a (1 - s) + s ((1 - t) b + t c)
    return (1.0 - s) * a + s * ((1.0 - t) * b + t * c);
  }

 private:
  Region region_;
  std::vector<double> cumulative_;
};

inline Point sample_uniform_in_region(const Region& region, PhiloxStream& rng) {
  return RegionSampler(region).sample(rng);
}

struct McEstimate {
  double outage_mean = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t outages = 0;
};

namespace detail {

inline unsigned resolve_threads(unsigned threads) {
  if (threads != 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(first, last) over fixed contiguous chunks and returns the per-chunk results in order.
template <class T, class Body>
std::vector<T> run_chunks(std::uint64_t n, unsigned threads, Body&& body) {
  threads = static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(threads), std::max<std::uint64_t>(n, 1)));
  std::vector<T> out(threads);
  const std::uint64_t per = n / threads;
  const std::uint64_t extra = n % threads;
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  std::uint64_t start = 0;
  for (unsigned i = 0; i < threads; ++i) {
    const std::uint64_t len = per + (i < extra ? 1 : 0);
    if (threads == 1) {
      out[i] = body(start, start + len);
    } else {
      pool.emplace_back([&out, &errors, &body, i, start, len] {
        try {
          out[i] = body(start, start + len);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
    start += len;
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace detail

// Outage occurs when G0 < beta (1/rho0 + r0^alpha sum_i G_i R_i^-alpha).
inline McEstimate simulate_outage(const Scenario& sc, std::uint64_t trials, std::uint64_t seed,
                                  unsigned threads = 0) {
  sc.validate();
  if (trials < 1) throw InvalidParameter("Monte Carlo needs at least one trial");
  const RegionSampler sampler(sc.region);
  const double r0a = std::pow(sc.r0, sc.alpha);
  const double half_alpha = 0.5 * sc.alpha;
  auto body = [&](std::uint64_t first, std::uint64_t last) {
    std::uint64_t count = 0;
    for (std::uint64_t i = first; i < last; ++i) {
      PhiloxStream rng(seed, i);
      const double g0 = sample_unit_gamma(sc.channel.m0, rng);
      double interference = 0.0;
      for (int k = 0; k < sc.interferers; ++k) {
        const Point x = sampler.sample(rng);
        const double dx = x.x - sc.receiver.x;
        const double dy = x.y - sc.receiver.y;
        const double g = sample_unit_gamma(sc.channel.m, rng);
        interference += g * std::exp(-half_alpha * std::log(dx * dx + dy * dy));
      }
      if (g0 < sc.beta * (1.0 / sc.rho0 + r0a * interference)) ++count;
    }
    return count;
  };
  const auto parts = detail::run_chunks<std::uint64_t>(trials, threads, body);
  McEstimate est;
  for (auto c : parts) est.outages += c;
  est.trials = trials;
  est.seed = seed;
  est.outage_mean = static_cast<double>(est.outages) / static_cast<double>(trials);
  est.std_error = std::sqrt(est.outage_mean * (1.0 - est.outage_mean) / static_cast<double>(trials));
  return est;
}

inline OutageResult to_outage_result(const McEstimate& e) {
  OutageResult out;
  out.method = Method::MonteCarlo;
  out.epsilon = e.outage_mean;
  out.tolerance = 3.0 * e.std_error;
  out.std_error = e.std_error;
  out.trials = e.trials;
  return out;
}

// Sorted sample of distances |X - y0| for uniform X.
struct EmpiricalDistribution {
  std::vector<double> sorted;

  double cdf(double r) const {
    if (sorted.empty()) return 0.0;
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), r);
    return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
  }

  // Two-sided Kolmogorov-Smirnov statistic against a continuous reference CDF.
  double ks_statistic(const std::function<double(double)>& reference) const {
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      const double f = reference(sorted[i]);
      d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
  }
};

// Asymptotic two-sided KS critical value at the 1% level.
inline double ks_critical_1pct(std::size_t n) { return 1.62762 / std::sqrt(static_cast<double>(n)); }

// Distances use streams offset from the outage-trial streams of the same seed.
inline EmpiricalDistribution simulate_distance_distribution(const Region& region, Point y0, std::uint64_t samples,
                                                            std::uint64_t seed, unsigned threads = 0) {
  if (!region.contains(y0)) throw InvalidParameter("reference point lies outside the region");
  const RegionSampler sampler(region);
  constexpr std::uint64_t kStreamOffset = 1ull << 62;
  constexpr std::uint64_t kPerStream = 1024;
  const std::uint64_t streams = (samples + kPerStream - 1) / kPerStream;
  auto body = [&](std::uint64_t first, std::uint64_t last) {
    std::vector<double> out;
    for (std::uint64_t s = first; s < last; ++s) {
      PhiloxStream rng(seed, kStreamOffset + s);
      const std::uint64_t end = std::min(samples, (s + 1) * kPerStream);
      for (std::uint64_t i = s * kPerStream; i < end; ++i) out.push_back(distance(sampler.sample(rng), y0));
    }
    return out;
  };
  const auto parts = detail::run_chunks<std::vector<double>>(streams, threads, body);
  EmpiricalDistribution e;
  e.sorted.reserve(samples);
  for (const auto& p : parts) e.sorted.insert(e.sorted.end(), p.begin(), p.end());
  std::sort(e.sorted.begin(), e.sorted.end());
  return e;
}

}  // namespace finnet
