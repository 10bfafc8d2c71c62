#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "deskorg/error.hpp"

namespace deskorg {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kGeomTol = 1e-9;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

using Point2 = Vec2;

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
// Left-hand normal (CCW quarter turn).
constexpr Vec2 perp(Vec2 a) { return {-a.y, a.x}; }
inline Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }
inline double angle_of(Vec2 a) { return std::atan2(a.y, a.x); }

inline Vec2 normalized(Vec2 a) {
  const double n = norm(a);
  if (n <= 0.0) throw Error(ErrorCode::degenerate_input, "zero-length vector");
  return a / n;
}

inline Vec2 rotate(Vec2 a, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}

inline bool is_finite(Vec2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

// Maps onto [-pi, pi). Values already in range are returned untouched so the
// operation is idempotent bit-for-bit.
inline double normalize_angle(double theta) {
  if (theta >= -kPi && theta < kPi) return theta;
  double r = theta - 2.0 * kPi * std::floor((theta + kPi) / (2.0 * kPi));
  if (r >= kPi) r -= 2.0 * kPi;
  if (r < -kPi) r += 2.0 * kPi;
  return r;
}

// Maps onto [0, period).
inline double wrap_positive(double theta, double period) {
  if (theta >= 0.0 && theta < period) return theta;
  double r = std::fmod(theta, period);
  if (r < 0.0) r += period;
  if (r >= period) r -= period;
  return r;
}

// Smallest absolute difference between two angles modulo `period`.
inline double angle_diff_mod(double a, double b, double period) {
  const double d = wrap_positive(a - b, period);
  return std::min(d, period - d);
}

struct Pose2 {
  Point2 position;
  double theta = 0.0;

  Pose2() = default;
  Pose2(Point2 p, double th) : position(p), theta(normalize_angle(th)) {}

  Point2 apply(Point2 body) const { return position + rotate(body, theta); }
  Point2 inverse_apply(Point2 world) const { return rotate(world - position, -theta); }
  Pose2 compose(const Pose2& rhs) const {
    return Pose2(apply(rhs.position), theta + rhs.theta);
  }
  friend bool operator==(const Pose2&, const Pose2&) = default;
};

struct GripperPose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double yaw = 0.0;
  double tilt = 0.0;

  Point2 xy() const { return {x, y}; }
  friend bool operator==(const GripperPose&, const GripperPose&) = default;
};

struct Segment {
  Point2 p0;
  Point2 p1;

  Vec2 vector() const { return p1 - p0; }
  double length() const { return norm(p1 - p0); }
  Point2 midpoint() const { return (p0 + p1) * 0.5; }
  double angle() const { return angle_of(p1 - p0); }
  Vec2 direction() const { return normalized(p1 - p0); }
  // Right-hand normal; points outward for an edge of a CCW polygon.
  Vec2 outward_normal() const {
    const Vec2 d = direction();
    return {d.y, -d.x};
  }
  friend bool operator==(const Segment&, const Segment&) = default;
};

inline double signed_area(std::span<const Point2> v) {
  const std::size_t n = v.size();
  double a = 0.0;
  for (std::size_t i = 0; i < n; ++i) a += cross(v[i], v[(i + 1) % n]);
  return 0.5 * a;
}

inline double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const Vec2 d = b - a;
  const double len2 = dot(d, d);
  if (len2 <= 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
  return distance(p, a + d * t);
}

inline int orientation_sign(Point2 a, Point2 b, Point2 c, double tol = 0.0) {
  const double v = cross(b - a, c - a);
  if (v > tol) return 1;
  if (v < -tol) return -1;
  return 0;
}

// Closed-segment intersection test (touching counts).
inline bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double tol = 1e-15;
  const int o1 = orientation_sign(a, b, c, tol), o2 = orientation_sign(a, b, d, tol);
  const int o3 = orientation_sign(c, d, a, tol), o4 = orientation_sign(c, d, b, tol);
  if (o1 != o2 && o3 != o4) return true;
  auto on_seg = [](Point2 p, Point2 q, Point2 r) {
    return std::min(p.x, q.x) - 1e-15 <= r.x && r.x <= std::max(p.x, q.x) + 1e-15 &&
           std::min(p.y, q.y) - 1e-15 <= r.y && r.y <= std::max(p.y, q.y) + 1e-15;
  };
  if (o1 == 0 && on_seg(a, b, c)) return true;
  if (o2 == 0 && on_seg(a, b, d)) return true;
  if (o3 == 0 && on_seg(c, d, a)) return true;
  if (o4 == 0 && on_seg(c, d, b)) return true;
  return false;
}

// Simple CCW polygon with positive area. A default-constructed Polygon is empty
// and only useful as a placeholder.
class Polygon {
 public:
  Polygon() = default;

  explicit Polygon(std::vector<Point2> vertices) : v_(std::move(vertices)) {
    validate();
  }

  // Accepts either winding and reverses clockwise input.
  static Polygon from_ring(std::vector<Point2> vertices) {
    if (vertices.size() >= 3 && signed_area(vertices) < 0.0)
      std::reverse(vertices.begin(), vertices.end());
    return Polygon(std::move(vertices));
  }

  // Skips validation; for rigid images of already-valid polygons.
  static Polygon trusted(std::vector<Point2> vertices) {
    Polygon p;
    p.v_ = std::move(vertices);
    return p;
  }

  const std::vector<Point2>& vertices() const { return v_; }
  std::size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }
  const Point2& operator[](std::size_t i) const { return v_[i]; }
  Segment edge(std::size_t i) const { return {v_[i], v_[(i + 1) % v_.size()]}; }
  double area() const { return signed_area(v_); }

  Point2 centroid() const {
    double a = 0.0, cx = 0.0, cy = 0.0;
    const std::size_t n = v_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2& p = v_[i];
      const Point2& q = v_[(i + 1) % n];
      const double c = cross(p, q);
      a += c;
      cx += (p.x + q.x) * c;
      cy += (p.y + q.y) * c;
    }
    return {cx / (3.0 * a), cy / (3.0 * a)};
  }

  bool is_convex() const {
    const std::size_t n = v_.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (cross(v_[(i + 1) % n] - v_[i], v_[(i + 2) % n] - v_[(i + 1) % n]) < -1e-12)
        return false;
    }
    return true;
  }

  friend bool operator==(const Polygon&, const Polygon&) = default;

 private:
  void validate() const {
    if (v_.size() < 3)
      throw Error(ErrorCode::invalid_polygon, "polygon needs at least 3 vertices");
    for (const auto& p : v_)
      if (!is_finite(p)) throw Error(ErrorCode::invalid_polygon, "non-finite vertex");
    if (!(signed_area(v_) > 0.0))
      throw Error(ErrorCode::invalid_polygon, "polygon must be CCW with positive area");
    const std::size_t n = v_.size();
    if (n > 3) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if (j == i + 1 || (i == 0 && j == n - 1)) continue;
          if (segments_intersect(v_[i], v_[(i + 1) % n], v_[j], v_[(j + 1) % n]))
            throw Error(ErrorCode::invalid_polygon, "polygon is not simple");
        }
      }
    }
  }

  std::vector<Point2> v_;
};

struct OrientedRect {
  Point2 center;
  double half_a = 0.0;  // along `angle`
  double half_b = 0.0;
  double angle = 0.0;   // [0, pi)

  Vec2 major_axis() const { return unit(angle); }
  Vec2 minor_axis() const { return perp(unit(angle)); }
  double area() const { return 4.0 * half_a * half_b; }

  // CCW starting from the (-a, -b) corner.
  std::array<Point2, 4> corners() const {
    const Vec2 u = major_axis() * half_a, v = minor_axis() * half_b;
    return {center - u - v, center + u - v, center + u + v, center - u + v};
  }

  // Midpoints of the edges of corners(), same order: two long sides interleaved
  // with two short sides.
  std::array<Point2, 4> edge_centers() const {
    const Vec2 u = major_axis() * half_a, v = minor_axis() * half_b;
    return {center - v, center + u, center + v, center - u};
  }

  Polygon to_polygon() const {
    const auto c = corners();
    return Polygon::trusted({c[0], c[1], c[2], c[3]});
  }
};

// Andrew's monotone chain. Collinear boundary points are dropped; the result
// starts at the lexicographically smallest point.
inline Polygon convex_hull(std::span<const Point2> points) {
  if (points.size() < 3)
    throw Error(ErrorCode::degenerate_input, "convex hull needs at least 3 points");
  std::vector<Point2> p(points.begin(), points.end());
  for (const auto& q : p)
    if (!is_finite(q)) throw Error(ErrorCode::degenerate_input, "non-finite point");
  std::sort(p.begin(), p.end(), [](Point2 a, Point2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3)
    throw Error(ErrorCode::degenerate_input, "fewer than 3 distinct points");

  std::vector<Point2> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= 0.0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= 0.0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  if (h.size() < 3 || !(signed_area(h) > 0.0))
    throw Error(ErrorCode::degenerate_input, "points are collinear");
  // The chain is CCW and convex by construction.
  return Polygon::trusted(std::move(h));
}

inline Polygon convex_hull(const Polygon& poly) { return convex_hull(poly.vertices()); }

// Rotating calipers. Among equal-area candidates the one with the larger
// aspect ratio wins (rotation-invariant), then the first encountered.
inline OrientedRect min_area_rect(const Polygon& poly) {
  const Polygon hull = convex_hull(poly.vertices());
  const auto& h = hull.vertices();
  const std::size_t n = h.size();
  auto nx = [n](std::size_t i) { return (i + 1) % n; };

  double best_area = std::numeric_limits<double>::infinity();
  double best_aspect = 0.0;
  OrientedRect best;
  std::size_t j = 1, k = 1, m = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 u = normalized(h[nx(i)] - h[i]);
    const Vec2 w = perp(u);  // inward for a CCW hull
    if (i == 0) {
      j = nx(i);
    }
    while (dot(h[nx(j)] - h[j], u) > 0.0) j = nx(j);
    if (i == 0) k = j;
    while (dot(h[nx(k)] - h[k], w) > 0.0) k = nx(k);
    if (i == 0) m = k;
    while (dot(h[nx(m)] - h[m], u) < 0.0) m = nx(m);

    const double u_max = dot(h[j] - h[i], u);
    const double u_min = dot(h[m] - h[i], u);
    const double height = dot(h[k] - h[i], w);
    const double width = u_max - u_min;
    const double area = width * height;
    const double aspect = std::max(width, height) / std::min(width, height);
    const bool better =
        area < best_area * (1.0 - 1e-9) ||
        (area <= best_area * (1.0 + 1e-9) && aspect > best_aspect * (1.0 + 1e-9));
    if (!better) continue;
    best_area = std::min(area, best_area);
    best_aspect = aspect;
    const Point2 c = h[i] + u * (0.5 * (u_max + u_min)) + w * (0.5 * height);
    double ang;
    if (width >= height) {
      best.half_a = 0.5 * width;
      best.half_b = 0.5 * height;
      ang = angle_of(u);
    } else {
      best.half_a = 0.5 * height;
      best.half_b = 0.5 * width;
      ang = angle_of(w);
    }
    best.center = c;
    best.angle = wrap_positive(ang, kPi);
  }
  if (!(best.half_b > 0.0))
    throw Error(ErrorCode::degenerate_input, "degenerate hull for min-area rect");
  // A square has no preferred long axis; report its orientation mod pi/2.
  if (best.half_a - best.half_b <= 1e-12 * best.half_a)
    best.angle = wrap_positive(best.angle, kPi / 2.0);
  return best;
}

// Closed Ramer-Douglas-Peucker anchored at the first diameter pair. Ties on
// the farthest vertex resolve to the lowest index, which makes the
// simplification idempotent.
inline Polygon approx_polygon(const Polygon& contour, double epsilon) {
  if (!(epsilon > 0.0))
    throw Error(ErrorCode::degenerate_input, "epsilon must be positive");
  const auto& v = contour.vertices();
  const std::size_t n = v.size();
  if (n < 3) throw Error(ErrorCode::degenerate_input, "contour has fewer than 3 vertices");

  std::size_t a = 0, b = 1;
  double dmax = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec2 d = v[j] - v[i];
      const double d2 = dot(d, d);
      if (d2 > dmax) {
        dmax = d2;
        a = i;
        b = j;
      }
    }
  }

  std::vector<char> keep(n, 0);
  keep[a] = keep[b] = 1;
  // Spans are walked CCW from first to last anchor, wrapping around.
  std::vector<std::pair<std::size_t, std::size_t>> stack{{a, b}, {b, a}};
  while (!stack.empty()) {
    const auto [s, e] = stack.back();
    stack.pop_back();
    double far = -1.0;
    std::size_t far_idx = n;
    for (std::size_t i = (s + 1) % n; i != e; i = (i + 1) % n) {
      const double d = point_segment_distance(v[i], v[s], v[e]);
      if (d > far || (d == far && i < far_idx)) {
        far = d;
        far_idx = i;
      }
    }
    if (far_idx != n && far > epsilon) {
      keep[far_idx] = 1;
      stack.push_back({far_idx, e});
      stack.push_back({s, far_idx});
    }
  }

  std::vector<Point2> out;
  for (std::size_t i = 0; i < n; ++i)
    if (keep[i]) out.push_back(v[i]);
  if (out.size() < 3 || !(signed_area(out) > 0.0))
    throw Error(ErrorCode::degenerate_input, "simplified polygon is degenerate");
  try {
    return Polygon(std::move(out));
  } catch (const Error&) {
    throw Error(ErrorCode::degenerate_input, "simplified polygon is not simple");
  }
}

// Boundary counts as inside.
inline bool point_in_polygon(Point2 p, const Polygon& poly) {
  const auto& v = poly.vertices();
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i)
    if (point_segment_distance(p, v[i], v[(i + 1) % n]) <= kGeomTol) return true;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      const double x = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

inline Point2 foot_of_perpendicular(Point2 p, const Segment& seg) {
  const Vec2 d = seg.p1 - seg.p0;
  const double len2 = dot(d, d);
  if (len2 <= 0.0) throw Error(ErrorCode::degenerate_input, "zero-length segment");
  const double t = dot(p - seg.p0, d) / len2;
  if (t <= 0.0) return seg.p0;
  if (t >= 1.0) return seg.p1;
  return seg.p0 + d * t;
}

struct NearestEdge {
  Segment segment;
  double distance = 0.0;
  std::size_t index = 0;
};

inline NearestEdge nearest_edge(const Polygon& poly, Point2 p) {
  NearestEdge best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Segment s = poly.edge(i);
    const double d = point_segment_distance(p, s.p0, s.p1);
    if (d < best.distance - 1e-12) best = {s, d, i};
  }
  return best;
}

inline Polygon transform(const Polygon& poly, const Pose2& pose) {
  std::vector<Point2> out;
  out.reserve(poly.size());
  for (const auto& p : poly.vertices()) out.push_back(pose.apply(p));
  return Polygon::trusted(std::move(out));
}

inline Polygon translate(const Polygon& poly, Vec2 t) {
  std::vector<Point2> out;
  out.reserve(poly.size());
  for (const auto& p : poly.vertices()) out.push_back(p + t);
  return Polygon::trusted(std::move(out));
}

// Sutherland-Hodgman; `clip` must be convex.
inline std::vector<Point2> clip_convex(std::span<const Point2> subject,
                                       const Polygon& clip) {
  std::vector<Point2> out(subject.begin(), subject.end());
  const auto& c = clip.vertices();
  for (std::size_t i = 0; i < c.size() && !out.empty(); ++i) {
    const Point2 a = c[i], b = c[(i + 1) % c.size()];
    std::vector<Point2> in;
    in.swap(out);
    for (std::size_t k = 0; k < in.size(); ++k) {
      const Point2 p = in[k], q = in[(k + 1) % in.size()];
      const double sp = cross(b - a, p - a), sq = cross(b - a, q - a);
      if (sp >= 0.0) out.push_back(p);
      if ((sp >= 0.0) != (sq >= 0.0)) {
        const double t = sp / (sp - sq);
        out.push_back(p + (q - p) * t);
      }
    }
  }
  return out;
}

inline double intersection_area(const Polygon& a, const Polygon& convex_b) {
  const auto c = clip_convex(a.vertices(), convex_b);
  return c.size() < 3 ? 0.0 : std::abs(signed_area(c));
}

inline double iou(const Polygon& a, const Polygon& b) {
  const double inter = intersection_area(a, b);
  return inter / (a.area() + b.area() - inter);
}

// Minimum boundary distance between two polygons; 0 if they touch or overlap.
inline double polygon_distance(const Polygon& a, const Polygon& b) {
  const auto& va = a.vertices();
  const auto& vb = b.vertices();
  for (std::size_t i = 0; i < va.size(); ++i)
    for (std::size_t j = 0; j < vb.size(); ++j)
      if (segments_intersect(va[i], va[(i + 1) % va.size()], vb[j],
                             vb[(j + 1) % vb.size()]))
        return 0.0;
  if (point_in_polygon(va[0], b) || point_in_polygon(vb[0], a)) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (const auto& p : va)
    for (std::size_t j = 0; j < vb.size(); ++j)
      d = std::min(d, point_segment_distance(p, vb[j], vb[(j + 1) % vb.size()]));
  for (const auto& p : vb)
    for (std::size_t i = 0; i < va.size(); ++i)
      d = std::min(d, point_segment_distance(p, va[i], va[(i + 1) % va.size()]));
  return d;
}

// Convex hull of a polygon and its translate: the area swept by a pure
// translation of a convex shape.
inline Polygon swept_hull(const Polygon& poly, Vec2 t) {
  std::vector<Point2> pts = poly.vertices();
  for (const auto& p : poly.vertices()) pts.push_back(p + t);
  return convex_hull(pts);
}

// Distance along `dir` from `origin` until leaving the convex polygon, plus the
// index of the exit edge.
inline std::pair<double, std::size_t> ray_exit(const Polygon& convex, Point2 origin,
                                               Vec2 dir) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t idx = 0;
  for (std::size_t i = 0; i < convex.size(); ++i) {
    const Segment e = convex.edge(i);
    const Vec2 n = e.outward_normal();
    const double denom = dot(dir, n);
    if (denom <= 1e-15) continue;
    const double t = dot(e.p0 - origin, n) / denom;
    if (t < best - 1e-12) {
      best = t;
      idx = i;
    }
  }
  return {std::max(best, 0.0), idx};
}

}  // namespace deskorg
