#pragma once

// Finite network regions (disk, convex polygon) and the distance distribution of a
// uniformly placed node as seen from a reference point inside the region.
//
// The density is evaluated through the inside-arc measure:
//   f_R(r) = r * Theta(r) / |A|,
// where Theta(r) is the angular measure of the circle of radius r around the
// reference point that lies inside the region. The CDF is the exact area of the
// disk/region overlap divided by |A|.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "finnet/errors.hpp"

namespace finnet {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

class Disk {
 public:
  Disk(Point center, double radius) : center_(center), radius_(radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
      throw InvalidParameter("disk radius must be positive, got " + std::to_string(radius));
    }
  }

  Point center() const { return center_; }
  double radius() const { return radius_; }
  double area() const { return kPi * radius_ * radius_; }

 private:
  Point center_;
  double radius_;
};

// Strictly convex polygon with counter-clockwise vertices.
class ConvexPolygon {
 public:
  explicit ConvexPolygon(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
    const std::size_t n = vertices_.size();
    if (n < 3) throw InvalidParameter("polygon needs at least 3 vertices");
    double twice_area = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      twice_area += cross(vertices_[i], vertices_[(i + 1) % n]);
    }
    area_ = 0.5 * twice_area;
    if (!(area_ > 0.0)) {
      throw InvalidParameter("polygon must have positive area with counter-clockwise vertices");
    }
    double cx = 0.0;
    double cy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Point a = vertices_[i];
      const Point b = vertices_[(i + 1) % n];
      const double c = cross(a, b);
      cx += (a.x + b.x) * c;
      cy += (a.y + b.y) * c;
    }
    centroid_ = {cx / (6.0 * area_), cy / (6.0 * area_)};
    for (const Point& v : vertices_) scale_ = std::max(scale_, distance(v, centroid_));

    double turning = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Point e0 = vertices_[(i + n - 1) % n] - vertices_[i];
      const Point e1 = vertices_[(i + 1) % n] - vertices_[i];
      const Point in = vertices_[i] - vertices_[(i + n - 1) % n];
      const double turn = cross(in, e1);
      if (!(turn > 1e-12 * norm(in) * norm(e1))) {
        throw InvalidParameter("polygon is not strictly convex at vertex " + std::to_string(i));
      }
      turning += kPi - std::atan2(cross(e1, e0), dot(e1, e0));
    }
    if (std::abs(turning - kTwoPi) > 1e-9) {
      throw InvalidParameter("polygon vertices wind more than once");
    }
  }

  std::span<const Point> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  double area() const { return area_; }
  Point centroid() const { return centroid_; }
  // Largest centroid-to-vertex distance; the tolerance length scale.
  double scale() const { return scale_; }

  // Interior angle at vertex i, between the sides ending and starting there.
  double interior_angle(std::size_t i) const {
    const std::size_t n = vertices_.size();
    const Point to_prev = vertices_[(i + n - 1) % n] - vertices_[i];
    const Point to_next = vertices_[(i + 1) % n] - vertices_[i];
    return std::atan2(cross(to_next, to_prev), dot(to_next, to_prev));
  }

  Point edge_midpoint(std::size_t i) const {
    return 0.5 * (vertices_[i] + vertices_[(i + 1) % vertices_.size()]);
  }

 private:
  std::vector<Point> vertices_;
  double area_ = 0.0;
  Point centroid_;
  double scale_ = 0.0;
};

class Region {
 public:
  Region(Disk d) : shape_(d) {}                    // NOLINT(google-explicit-constructor)
  Region(ConvexPolygon p) : shape_(std::move(p)) {}  // NOLINT(google-explicit-constructor)

  bool is_disk() const { return std::holds_alternative<Disk>(shape_); }
  const Disk& disk() const { return std::get<Disk>(shape_); }
  const ConvexPolygon& polygon() const { return std::get<ConvexPolygon>(shape_); }

  double area() const {
    return std::visit([](const auto& s) { return s.area(); }, shape_);
  }
  double scale() const { return is_disk() ? disk().radius() : polygon().scale(); }
  Point center() const { return is_disk() ? disk().center() : polygon().centroid(); }

  // Closed containment with tolerance 1e-12 * scale.
  bool contains(Point p) const {
    const double tol = 1e-12 * scale();
    if (is_disk()) return distance(p, disk().center()) <= disk().radius() + tol;
    const auto v = polygon().vertices();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Point a = v[i];
      const Point b = v[(i + 1) % v.size()];
      if (cross(b - a, p - a) < -tol * norm(b - a)) return false;
    }
    return true;
  }

 private:
  std::variant<Disk, ConvexPolygon> shape_;
};

// ---------------------------------------------------------------------------
// Constructors for the standard regions.

inline double regular_polygon_area(int sides, double circumradius) {
  return 0.5 * sides * circumradius * circumradius * std::sin(kTwoPi / sides);
}

inline double regular_polygon_interior_angle(int sides) { return kPi * (sides - 2) / sides; }

// L vertices on the circle of radius W around center, first vertex at angle `rotation`.
inline ConvexPolygon make_regular_polygon(int sides, double circumradius, Point center = {},
                                          double rotation = 0.0) {
  if (sides < 3) throw InvalidParameter("regular polygon needs L >= 3, got " + std::to_string(sides));
  if (!(circumradius > 0.0)) {
    throw InvalidParameter("regular polygon needs W > 0, got " + std::to_string(circumradius));
  }
  std::vector<Point> v;
  v.reserve(sides);
  for (int k = 0; k < sides; ++k) {
    const double phi = rotation + kTwoPi * k / sides;
    v.push_back({center.x + circumradius * std::cos(phi), center.y + circumradius * std::sin(phi)});
  }
  return ConvexPolygon(std::move(v));
}

// Circumradius giving a regular L-gon of the requested area.
inline double regular_polygon_circumradius_for_area(int sides, double area) {
  if (sides < 3) throw InvalidParameter("regular polygon needs L >= 3");
  if (!(area > 0.0)) throw InvalidParameter("area must be positive");
  return std::sqrt(2.0 * area / (sides * std::sin(kTwoPi / sides)));
}

// Quadrilateral with a right angle at V1 = origin, V2 = (sqrt(3) W, 0), a pi/4
// angle at V2, |V2 V3| = sqrt(3) W and V4 = (0, W). Area is about 1.3143 W^2.
inline ConvexPolygon make_benchmark_quadrilateral(double w) {
  if (!(w > 0.0)) throw InvalidParameter("quadrilateral scale W must be positive");
  const double s3 = std::sqrt(3.0);
  const double h = std::sqrt(1.5);  // sqrt(3) * sin(pi/4)
  return ConvexPolygon({{0.0, 0.0}, {s3 * w, 0.0}, {(s3 - h) * w, h * w}, {0.0, w}});
}

// ---------------------------------------------------------------------------
// Inside-arc measure and overlap area.

namespace detail {

inline double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

// One polygon side seen from the reference point.
struct SideView {
  double normal_angle;  // direction of the outward normal
  double distance;      // perpendicular distance, >= 0
};

inline std::vector<SideView> side_views(const ConvexPolygon& poly, Point y0) {
  const auto v = poly.vertices();
  std::vector<SideView> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point a = v[i];
    const Point b = v[(i + 1) % v.size()];
    const Point e = b - a;
    const double len = norm(e);
    const Point n{e.y / len, -e.x / len};
    const double p = std::max(0.0, dot(a - y0, n));
    out.push_back({std::atan2(n.y, n.x), p});
  }
  return out;
}

// Theta(r) = 2 pi minus the union of the arcs cut off by each side.
inline double polygon_arc_measure(std::span<const SideView> sides, double r) {
  if (r <= 0.0) return kTwoPi;
  // Excluded arcs as intervals in [0, 2pi), wrapping arcs split in two.
  std::vector<std::pair<double, double>> cut;
  cut.reserve(2 * sides.size());
  for (const SideView& s : sides) {
    if (r <= s.distance) continue;
    const double half = std::acos(clamp_unit(s.distance / r));
    double lo = s.normal_angle - half;
    double hi = s.normal_angle + half;
    lo = std::fmod(lo, kTwoPi);
    if (lo < 0.0) lo += kTwoPi;
    hi = lo + 2.0 * half;
    if (hi <= kTwoPi) {
      cut.emplace_back(lo, hi);
    } else {
      cut.emplace_back(lo, kTwoPi);
      cut.emplace_back(0.0, hi - kTwoPi);
    }
  }
  if (cut.empty()) return kTwoPi;
  std::sort(cut.begin(), cut.end());
  double covered = 0.0;
  double cur_lo = cut.front().first;
  double cur_hi = cut.front().second;
  for (std::size_t i = 1; i < cut.size(); ++i) {
    if (cut[i].first <= cur_hi) {
      cur_hi = std::max(cur_hi, cut[i].second);
    } else {
      covered += cur_hi - cur_lo;
      cur_lo = cut[i].first;
      cur_hi = cut[i].second;
    }
  }
  covered += cur_hi - cur_lo;
  return std::max(0.0, kTwoPi - covered);
}

inline double disk_arc_measure(double w, double d, double r) {
  if (r <= 0.0 || r <= w - d) return kTwoPi;
  if (r >= w + d) return 0.0;
  return 2.0 * std::acos(clamp_unit((r * r + d * d - w * w) / (2.0 * d * r)));
}

// Area of (disk of radius r at origin) intersected with triangle (origin, a, b), signed
// by the orientation of (a, b). Segment pieces inside the circle contribute a triangle,
// pieces outside contribute a circular sector.
inline double circle_triangle_area(Point a, Point b, double r) {
  const Point d = b - a;
  const double qa = dot(d, d);
  if (qa == 0.0) return 0.0;
  const double qb = 2.0 * dot(a, d);
  const double qc = dot(a, a) - r * r;
  double ts[4] = {0.0, 0.0, 0.0, 1.0};
  int nt = 1;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    const double t1 = (-qb - sq) / (2.0 * qa);
    const double t2 = (-qb + sq) / (2.0 * qa);
    if (t1 > 0.0 && t1 < 1.0) ts[nt++] = t1;
    if (t2 > 0.0 && t2 < 1.0) ts[nt++] = t2;
  }
  ts[nt++] = 1.0;
  double area = 0.0;
  for (int i = 0; i + 1 < nt; ++i) {
    const Point p = a + ts[i] * d;
    const Point q = a + ts[i + 1] * d;
    const Point mid = 0.5 * (p + q);
    if (dot(mid, mid) <= r * r) {
      area += 0.5 * cross(p, q);
    } else {
      area += 0.5 * r * r * std::atan2(cross(p, q), dot(p, q));
    }
  }
  return area;
}

inline double disk_overlap_area(double w, double d, double r) {
  if (r <= 0.0) return 0.0;
  if (r + d <= w) return kPi * r * r;
  if (r >= w + d) return kPi * w * w;
  const double a1 = r * r * std::acos(clamp_unit((d * d + r * r - w * w) / (2.0 * d * r)));
  const double a2 = w * w * std::acos(clamp_unit((d * d + w * w - r * r) / (2.0 * d * w)));
  const double k = (-d + r + w) * (d + r - w) * (d - r + w) * (d + r + w);
  return a1 + a2 - 0.5 * std::sqrt(std::max(0.0, k));
}

inline double polygon_overlap_area(const ConvexPolygon& poly, Point y0, double r) {
  if (r <= 0.0) return 0.0;
  const auto v = poly.vertices();
  double area = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    area += circle_triangle_area(v[i] - y0, v[(i + 1) % v.size()] - y0, r);
  }
  return std::clamp(area, 0.0, poly.area());
}

inline void require_inside(const Region& region, Point y0) {
  if (!region.contains(y0)) {
    throw InvalidParameter("reference point (" + std::to_string(y0.x) + ", " + std::to_string(y0.y) +
                           ") lies outside the region");
  }
}

}  // namespace detail

// Angular measure (radians) of the directions from y0 whose point at distance r lies
// inside the region.
inline double inside_arc_measure(const Region& region, Point y0, double r) {
  if (r < 0.0) throw InvalidParameter("radius must be non-negative");
  detail::require_inside(region, y0);
  if (region.is_disk()) {
    const Disk& d = region.disk();
    return detail::disk_arc_measure(d.radius(), std::min(distance(y0, d.center()), d.radius()), r);
  }
  const auto sides = detail::side_views(region.polygon(), y0);
  return detail::polygon_arc_measure(sides, r);
}

// Area of region intersected with the disk of radius r around y0.
inline double overlap_area(const Region& region, Point y0, double r) {
  detail::require_inside(region, y0);
  if (region.is_disk()) {
    const Disk& d = region.disk();
    return detail::disk_overlap_area(d.radius(), std::min(distance(y0, d.center()), d.radius()), r);
  }
  return detail::polygon_overlap_area(region.polygon(), y0, r);
}

// PDF/CDF of the distance from y0 to a node placed uniformly in the region.
class DistanceProfile {
 public:
  DistanceProfile(Region region, Point y0) : region_(std::move(region)), y0_(y0) {
    detail::require_inside(region_, y0_);
    area_ = region_.area();
    const double tol = 1e-12 * region_.scale();
    std::vector<double> raw;
    double raw_core = 0.0;
    if (region_.is_disk()) {
      const Disk& d = region_.disk();
      offset_ = std::min(distance(y0_, d.center()), d.radius());
      r_max_ = d.radius() + offset_;
      raw_core = d.radius() - offset_;
      raw.push_back(raw_core);
    } else {
      const ConvexPolygon& poly = region_.polygon();
      sides_ = detail::side_views(poly, y0_);
      for (const auto& s : sides_) raw.push_back(s.distance);
      for (const Point& v : poly.vertices()) {
        const double dv = distance(v, y0_);
        raw.push_back(dv);
        r_max_ = std::max(r_max_, dv);
      }
    }
    raw.push_back(r_max_);
    std::sort(raw.begin(), raw.end());
    for (double b : raw) {
      if (b <= tol) continue;
      if (!breakpoints_.empty() && b - breakpoints_.back() <= tol) continue;
      breakpoints_.push_back(b);
    }
    // The last breakpoint is r_max itself.
    breakpoints_.back() = r_max_;
    // A disk offers no constant-angle piece when the reference sits on its rim.
    core_radius_ = region_.is_disk() ? std::max(raw_core, 0.0) : breakpoints_.front();
    if (core_radius_ <= tol) core_radius_ = 0.0;
    if (core_radius_ > 0.0) core_angle_ = arc_measure(0.5 * core_radius_);
  }

  const Region& region() const { return region_; }
  Point reference() const { return y0_; }
  double area() const { return area_; }
  double r_max() const { return r_max_; }

  // Sorted, deduplicated critical radii; the last entry is r_max.
  std::span<const double> breakpoints() const { return breakpoints_; }

  // {0, breakpoints...}: the panel boundaries for integrals against the pdf.
  std::vector<double> panels() const {
    std::vector<double> p{0.0};
    p.insert(p.end(), breakpoints_.begin(), breakpoints_.end());
    return p;
  }

  // Theta is constant on [0, core_radius()] and equals core_angle() there.
  // Zero when no such piece exists (reference on the rim of a disk).
  double core_radius() const { return core_radius_; }
  double core_angle() const { return core_angle_; }

  double arc_measure(double r) const {
    if (r >= r_max_) return 0.0;
    if (region_.is_disk()) return detail::disk_arc_measure(region_.disk().radius(), offset_, r);
    return detail::polygon_arc_measure(sides_, r);
  }

  double pdf(double r) const {
    if (r <= 0.0 || r >= r_max_) return 0.0;
    return r * arc_measure(r) / area_;
  }

  double cdf(double r) const {
    if (r <= 0.0) return 0.0;
    if (r >= r_max_) return 1.0;
    double a = 0.0;
    if (region_.is_disk()) {
      a = detail::disk_overlap_area(region_.disk().radius(), offset_, r);
    } else {
      a = detail::polygon_overlap_area(region_.polygon(), y0_, r);
    }
    return std::clamp(a / area_, 0.0, 1.0);
  }

 private:
  Region region_;
  Point y0_;
  double area_ = 0.0;
  double r_max_ = 0.0;
  double offset_ = 0.0;  // disk only
  double core_radius_ = 0.0;
  double core_angle_ = kTwoPi;
  std::vector<detail::SideView> sides_;
  std::vector<double> breakpoints_;
};

inline DistanceProfile distance_profile(const Region& region, Point y0) { return {region, y0}; }

// ---------------------------------------------------------------------------
// Closed-form densities for the special placements.

// Reference point at distance d from the centre of a disk of radius W.
inline double pdf_disk_closed_form(double w, double d, double r) {
  if (!(w > 0.0) || d < 0.0 || d > w || r < 0.0) {
    throw InvalidParameter("disk closed form needs W > 0, 0 <= d <= W, r >= 0");
  }
  const double area = kPi * w * w;
  if (r <= w - d) return kTwoPi * r / area;
  if (r >= w + d) return 0.0;
  return 2.0 * r * std::acos(detail::clamp_unit((r * r + d * d - w * w) / (2.0 * d * r))) / area;
}

// Reference point at the centre of a regular L-gon with circumradius W.
inline double pdf_regular_polygon_center(int sides, double w, double r) {
  if (sides < 3 || !(w > 0.0)) throw InvalidParameter("regular polygon needs L >= 3 and W > 0");
  if (r < 0.0) throw InvalidParameter("radius must be non-negative");
  const double area = regular_polygon_area(sides, w);
  const double apothem = w * std::sin(0.5 * regular_polygon_interior_angle(sides));
  if (r <= apothem) return kTwoPi * r / area;
  if (r >= w) return 0.0;
  return (kTwoPi * r - 2.0 * sides * r * std::acos(apothem / r)) / area;
}

// Exact constants of the two-piece density at vertex V2 of make_benchmark_quadrilateral.
struct QuadrilateralVertexConstants {
  double corner_angle;   // interior angle at V2, pi/4
  double second_angle;   // coefficient of r on the outer piece (interior angle at V3 minus pi/4)
  double inner_cut;      // sqrt(3) W: distance to side V4V1 and to V1, V3
  double outer_cut;      // perpendicular distance from V2 to side V3V4
  double r_max;          // 2 W, distance to V4
  double area;
};

inline QuadrilateralVertexConstants quadrilateral_vertex_constants(double w) {
  const double s3 = std::sqrt(3.0);
  const double h = std::sqrt(1.5);
  const Point v2{s3 * w, 0.0};
  const Point v3{(s3 - h) * w, h * w};
  const Point v4{0.0, w};
  const Point a = v2 - v3;
  const Point b = v4 - v3;
  const double angle_v3 = std::acos(dot(a, b) / (norm(a) * norm(b)));
  const double outer_cut = std::abs(cross(v3 - v4, v2 - v4)) / norm(v3 - v4);
  const double area = 0.5 * (s3 * w * h * w + (s3 - h) * w * w);  // shoelace, V1 at origin
  return {kPi / 4.0, angle_v3 - kPi / 4.0, s3 * w, outer_cut, 2.0 * w, area};
}

inline double pdf_quadrilateral_vertex(double w, double r) {
  const auto k = quadrilateral_vertex_constants(w);
  if (r <= 0.0 || r >= k.r_max) return 0.0;
  if (r <= k.inner_cut) return k.corner_angle * r / k.area;
  return (k.second_angle * r - r * std::acos(k.inner_cut / r) - r * std::acos(k.outer_cut / r)) / k.area;
}

// Density from the side/corner decomposition: circular segments cut off beyond each
// side (derivative 2 r acos(p/r)) and the corner overlaps of adjacent segments added
// back (derivative r (delta - pi + acos(p_l/r) + acos(p_{l-1}/r))). Only adjacent
// overlaps are added back once r passes the corner vertex. That is exact when the foot
// of the perpendicular from y0 to every side line falls on the side itself (acute
// triangles, the centre of regular polygons). Otherwise the circle enters a corner
// overlap before reaching the vertex and the density is under-counted there: at V2 of
// the benchmark quadrilateral this happens for r between dist(V2, line V3V4) and |V2V3|.
// DistanceProfile is the general evaluator.
inline double pdf_segment_decomposition(const ConvexPolygon& poly, Point y0, double r) {
  detail::require_inside(Region(poly), y0);
  const auto v = poly.vertices();
  const std::size_t n = v.size();
  double r_max = 0.0;
  for (const Point& p : v) r_max = std::max(r_max, distance(p, y0));
  if (r <= 0.0 || r >= r_max) return 0.0;
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point e = v[(i + 1) % n] - v[i];
    p[i] = std::max(0.0, cross(e, y0 - v[i]) / norm(e));
  }
  auto ac = [r](double dist) { return r > dist ? std::acos(detail::clamp_unit(dist / r)) : 0.0; };
  double dens = kTwoPi * r;
  for (std::size_t i = 0; i < n; ++i) dens -= 2.0 * r * ac(p[i]);
  for (std::size_t i = 0; i < n; ++i) {
    if (r > distance(v[i], y0)) {
      const std::size_t prev = (i + n - 1) % n;
      dens += r * (-kPi + poly.interior_angle(i) + ac(p[i]) + ac(p[prev]));
    }
  }
  return dens / poly.area();
}

}  // namespace finnet
