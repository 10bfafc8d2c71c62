#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "deskorg/geometry.hpp"
#include "deskorg/kdtree.hpp"
#include "deskorg/rng.hpp"
#include "deskorg/scene.hpp"
#include "deskorg/table.hpp"

namespace deskorg {

struct PointCloud3 {
  std::vector<Vec3> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  friend bool operator==(const PointCloud3&, const PointCloud3&) = default;
};

struct PerceptionConfig {
  double voxel_leaf = 0.004;
  std::size_t outlier_k = 8;
  double outlier_stddev_mult = 1.0;
  double ransac_dist = 0.005;
  std::size_t ransac_iters = 500;
  double approx_epsilon = 0.002;  // keypoint RDP tolerance (a guess)
  // Table boundary: RDP tolerance used before edge selection, minimum edge
  // length, and the in-plane density filter that drops stray inliers.
  double edge_fit_epsilon = 0.02;
  double min_edge_length = 0.10;
  double density_radius_mult = 2.5;
  std::size_t density_min_neighbors = 2;
  // Edge line refit from the outermost boundary sample per bin.
  double edge_refit_band = 0.03;
  double edge_refit_bin = 0.02;
  std::uint64_t rng_seed = 0;
};

// One centroid per occupied voxel, emitted in voxel-key order.
inline PointCloud3 voxel_downsample(const PointCloud3& cloud, double leaf) {
  if (!(leaf > 0.0)) throw Error(ErrorCode::degenerate_input, "voxel leaf must be positive");
  using Key = std::array<std::int64_t, 3>;
  const std::size_t n = cloud.size();
  std::vector<Key> keys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& p = cloud.points[i];
    keys[i] = {static_cast<std::int64_t>(std::floor(p.x / leaf)),
               static_cast<std::int64_t>(std::floor(p.y / leaf)),
               static_cast<std::int64_t>(std::floor(p.z / leaf))};
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  PointCloud3 out;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    Vec3 sum{};
    while (j < n && keys[order[j]] == keys[order[i]]) sum = sum + cloud.points[order[j++]];
    out.points.push_back(sum * (1.0 / static_cast<double>(j - i)));
    i = j;
  }
  return out;
}

// Statistical outlier removal on mean k-NN distance. Returns kept indices.
inline std::vector<std::size_t> outlier_inliers(const PointCloud3& cloud, std::size_t k,
                                                double stddev_mult) {
  if (k < 1) throw Error(ErrorCode::degenerate_input, "k must be at least 1");
  if (cloud.size() <= k)
    throw Error(ErrorCode::too_few_points, "cloud size must exceed k");
  detail::KdTree3 tree(cloud.points);
  const std::size_t n = cloud.size();
  std::vector<double> mean_d(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto nn = tree.knn(cloud.points[i], k, i);
    double s = 0.0;
    for (const auto& [d2, j] : nn) s += std::sqrt(d2);
    mean_d[i] = s / static_cast<double>(nn.size());
  }
  double mu = 0.0;
  for (double d : mean_d) mu += d;
  mu /= static_cast<double>(n);
  double var = 0.0;
  for (double d : mean_d) var += (d - mu) * (d - mu);
  const double sigma = std::sqrt(var / static_cast<double>(n));
  const double limit = mu + stddev_mult * sigma + 1e-12 * std::max(1.0, mu);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n; ++i)
    if (mean_d[i] <= limit) keep.push_back(i);
  return keep;
}

inline PointCloud3 remove_outliers(const PointCloud3& cloud, std::size_t k,
                                   double stddev_mult) {
  PointCloud3 out;
  for (std::size_t i : outlier_inliers(cloud, k, stddev_mult)) out.points.push_back(cloud.points[i]);
  return out;
}

struct PlaneFit {
  PlaneModel plane;
  std::vector<std::size_t> inliers;
};

namespace detail {

inline PlaneModel orient_up(Vec3 n, double offset) {
  const double len = norm(n);
  n = n * (1.0 / len);
  offset /= len;
  const bool flip = n.z < 0.0 || (n.z == 0.0 && (n.x < 0.0 || (n.x == 0.0 && n.y < 0.0)));
  if (flip) {
    n = n * -1.0;
    offset = -offset;
  }
  return {n, offset};
}

// Total least squares plane through the given points.
inline PlaneModel fit_plane_lsq(const std::vector<Vec3>& pts,
                                const std::vector<std::size_t>& idx) {
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (std::size_t i : idx) c += Eigen::Vector3d(pts[i].x, pts[i].y, pts[i].z);
  c /= static_cast<double>(idx.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::size_t i : idx) {
    const Eigen::Vector3d d = Eigen::Vector3d(pts[i].x, pts[i].y, pts[i].z) - c;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  const Eigen::Vector3d n = es.eigenvectors().col(0);
  const Vec3 normal{n.x(), n.y(), n.z()};
  return orient_up(normal, dot(normal, Vec3{c.x(), c.y(), c.z()}));
}

}  // namespace detail

inline PlaneFit ransac_plane(const PointCloud3& cloud, const PerceptionConfig& cfg) {
  const auto& pts = cloud.points;
  const std::size_t n = pts.size();
  if (n < 3) throw Error(ErrorCode::degenerate_input, "RANSAC needs at least 3 points");
  {
    std::size_t far = 0;
    double fd = -1.0;
    for (std::size_t i = 1; i < n; ++i) {
      const double d = norm(pts[i] - pts[0]);
      if (d > fd) {
        fd = d;
        far = i;
      }
    }
    const Vec3 axis = pts[far] - pts[0];
    double spread = 0.0;
    for (std::size_t i = 0; i < n && fd > 0.0; ++i)
      spread = std::max(spread, norm(cross(axis, pts[i] - pts[0])) / fd);
    if (!(spread > kGeomTol))
      throw Error(ErrorCode::degenerate_input, "points are collinear");
  }

  Rng rng(cfg.rng_seed);
  std::size_t best_count = 0;
  PlaneModel best;
  for (std::size_t it = 0; it < cfg.ransac_iters; ++it) {
    const std::size_t a = rng.index(n), b = rng.index(n), c = rng.index(n);
    if (a == b || b == c || a == c) continue;
    const Vec3 nrm = cross(pts[b] - pts[a], pts[c] - pts[a]);
    if (norm(nrm) < 1e-12) continue;
    const PlaneModel m = detail::orient_up(nrm, dot(nrm, pts[a]));
    std::size_t count = 0;
    for (const auto& p : pts) count += std::abs(m.signed_distance(p)) <= cfg.ransac_dist;
    if (count > best_count) {
      best_count = count;
      best = m;
    }
  }
  if (best_count == 0)
    throw Error(ErrorCode::degenerate_input, "no non-degenerate sample found");

  auto collect = [&](const PlaneModel& m) {
    std::vector<std::size_t> in;
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(m.signed_distance(pts[i])) <= cfg.ransac_dist) in.push_back(i);
    return in;
  };
  PlaneFit fit;
  fit.plane = detail::fit_plane_lsq(pts, collect(best));
  fit.inliers = collect(fit.plane);
  if (fit.inliers.size() < 3 || static_cast<double>(fit.inliers.size()) < 0.10 * static_cast<double>(n))
    throw Error(ErrorCode::no_consensus, "best plane explains fewer than 10% of points");
  return fit;
}

namespace detail {

// Refits an approximate boundary edge to the outermost support points along
// it. Bins near the corners are skipped; bins whose outward offset is far from
// the median (strays that survived filtering) are rejected before the
// least-squares line fit.
inline Segment refit_edge(const Segment& e, const std::vector<Point2>& pts,
                          double band, double bin) {
  const double len = e.length();
  const Vec2 d = e.direction(), n = e.outward_normal();
  const auto nbins = static_cast<std::size_t>(std::max(1.0, std::floor(len / bin)));
  std::vector<double> best_s(nbins, -1e300), best_t(nbins, 0.0);
  for (const auto& p : pts) {
    const double t = dot(p - e.p0, d);
    if (t < 0.1 * len || t > 0.9 * len) continue;
    const double s = dot(p - e.p0, n);
    if (std::abs(s) > band) continue;
    const auto b = std::min(nbins - 1, static_cast<std::size_t>(t / bin));
    if (s > best_s[b]) {
      best_s[b] = s;
      best_t[b] = t;
    }
  }
  std::vector<double> ts, ss;
  for (std::size_t b = 0; b < nbins; ++b) {
    if (best_s[b] > -1e299) {
      ts.push_back(best_t[b]);
      ss.push_back(best_s[b]);
    }
  }
  if (ss.size() < 3) return e;
  auto median = [](std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  const double med = median(ss);
  std::vector<double> dev;
  for (double s : ss) dev.push_back(std::abs(s - med));
  const double cut = std::max(3.0 * 1.4826 * median(dev), 0.002);
  double sw = 0, st = 0, sss = 0, stt = 0, sts = 0;
  for (std::size_t i = 0; i < ss.size(); ++i) {
    if (std::abs(ss[i] - med) > cut) continue;
    sw += 1;
    st += ts[i];
    sss += ss[i];
    stt += ts[i] * ts[i];
    sts += ts[i] * ss[i];
  }
  if (sw < 3) return e;
  const double den = sw * stt - st * st;
  if (std::abs(den) < 1e-18) return e;
  const double slope = (sw * sts - st * sss) / den;
  const double icpt = (sss - slope * st) / sw;
  return {e.p0 + n * icpt, e.p1 + n * (icpt + slope * len)};
}

}  // namespace detail

struct TableExtraction {
  TableModel table;
  PointCloud3 filtered;               // after voxel + outlier filtering
  std::vector<std::size_t> inliers;   // indices into `filtered`
  std::vector<Point2> support_points; // projected inliers kept by the density filter
};

inline TableExtraction extract_table_detailed(const PointCloud3& cloud,
                                              const PerceptionConfig& cfg) {
  TableExtraction ex;
  PointCloud3 down = voxel_downsample(cloud, cfg.voxel_leaf);
  ex.filtered = down.size() > cfg.outlier_k
                    ? remove_outliers(down, cfg.outlier_k, cfg.outlier_stddev_mult)
                    : down;
  const PlaneFit fit = ransac_plane(ex.filtered, cfg);
  ex.inliers = fit.inliers;

  std::vector<Vec3> flat;
  flat.reserve(fit.inliers.size());
  for (std::size_t i : fit.inliers) {
    const Point2 q = fit.plane.project(ex.filtered.points[i]);
    flat.push_back({q.x, q.y, 0.0});
  }
  // Isolated in-plane strays (outliers that happen to sit on the plane) would
  // otherwise bulge the hull; keep points with enough neighbours at the
  // sampling scale.
  detail::KdTree3 tree(flat);
  std::vector<double> nn(flat.size());
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const auto r = tree.knn(flat[i], 1, i);
    nn[i] = r.empty() ? 0.0 : std::sqrt(r[0].first);
  }
  std::vector<double> sorted = nn;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double spacing = sorted.empty() ? 0.0 : sorted[sorted.size() / 2];
  const double radius = cfg.density_radius_mult * spacing;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    if (cfg.density_min_neighbors == 0 ||
        tree.radius_count(flat[i], radius, i, cfg.density_min_neighbors) >=
            cfg.density_min_neighbors)
      ex.support_points.push_back({flat[i].x, flat[i].y});
  }
  if (ex.support_points.size() < 3)
    throw Error(ErrorCode::no_consensus, "too few table points survive filtering");

  const Polygon hull = convex_hull(ex.support_points);
  const Polygon fitted = approx_polygon(hull, cfg.edge_fit_epsilon);
  ex.table.plane = fit.plane;
  ex.table.support_polygon = hull;
  for (std::size_t i = 0; i < fitted.size(); ++i) {
    const Segment e = fitted.edge(i);
    if (e.length() > cfg.min_edge_length)
      ex.table.edges.push_back(
          detail::refit_edge(e, ex.support_points, cfg.edge_refit_band, cfg.edge_refit_bin));
  }
  if (ex.table.edges.empty())
    throw Error(ErrorCode::no_consensus, "no table edge longer than the minimum");
  ex.table.dominant_edge = select_dominant_edge(ex.table.edges);
  return ex;
}

inline TableModel extract_table(const PointCloud3& cloud, const PerceptionConfig& cfg) {
  return extract_table_detailed(cloud, cfg).table;
}

struct PoseEstimate {
  Pose2 pose;
  double length = 0.0;
  double width = 0.0;
};

inline PoseEstimate estimate_pose_minrect(const Polygon& contour) {
  const OrientedRect r = min_area_rect(contour);
  return {Pose2(r.center, r.angle), 2.0 * r.half_a, 2.0 * r.half_b};
}

inline std::vector<Point2> extract_keypoints(const Polygon& contour,
                                             const PerceptionConfig& cfg) {
  const Polygon simplified = approx_polygon(convex_hull(contour), cfg.approx_epsilon);
  std::vector<Point2> v = simplified.vertices();
  const auto first = std::min_element(v.begin(), v.end(), [](Point2 a, Point2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  std::rotate(v.begin(), first, v.end());
  return v;
}

// ---------------------------------------------------------------------------
// Synthetic depth clouds.

enum class PointLabel { table, object, outlier };

struct LabeledCloud {
  PointCloud3 cloud;
  std::vector<PointLabel> labels;
};

struct SynthOptions {
  double spacing = 0.008;      // stratified sampling cell
  double fov_margin = 0.05;    // outlier box beyond the table bounds
  double floor_depth = 0.75;   // floor below the table top
};

// Overhead orthographic sampling of the table and object tops (z-max per
// sample), Gaussian z noise, and uniform outliers between the surface below
// and the camera.
inline LabeledCloud synth_cloud_labeled(const Scene& scene, double camera_height,
                                        double noise_sigma, double outlier_fraction,
                                        std::uint64_t seed, const SynthOptions& opt = {}) {
  Rng rng(seed);
  const PlaneModel& plane = scene.table.plane;
  const Polygon& top = scene.table.support_polygon;
  const double table_z = scene.table_z();

  struct Tops {
    Polygon fp;
    double z;
    double x0, x1, y0, y1;
  };
  std::vector<Tops> tops;
  for (const auto& o : scene.objects) {
    if (o.location != Location::desk || is_fixture(o.category)) continue;
    Tops t{o.world_footprint(), scene.top_z(o) - table_z, 1e300, -1e300, 1e300, -1e300};
    for (const auto& p : t.fp.vertices()) {
      t.x0 = std::min(t.x0, p.x); t.x1 = std::max(t.x1, p.x);
      t.y0 = std::min(t.y0, p.y); t.y1 = std::max(t.y1, p.y);
    }
    tops.push_back(std::move(t));
  }

  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& p : top.vertices()) {
    x0 = std::min(x0, p.x); x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y); y1 = std::max(y1, p.y);
  }

  LabeledCloud out;
  const double s = opt.spacing;
  const auto nx = static_cast<long>(std::ceil((x1 - x0) / s));
  const auto ny = static_cast<long>(std::ceil((y1 - y0) / s));
  for (long iy = 0; iy < ny; ++iy) {
    for (long ix = 0; ix < nx; ++ix) {
      const Point2 q{x0 + (static_cast<double>(ix) + rng.uniform()) * s,
                     y0 + (static_cast<double>(iy) + rng.uniform()) * s};
      const double noise = noise_sigma > 0.0 ? noise_sigma * rng.normal() : 0.0;
      if (!point_in_polygon(q, top)) continue;
      double h = 0.0;
      PointLabel label = PointLabel::table;
      for (const auto& t : tops) {
        if (q.x < t.x0 || q.x > t.x1 || q.y < t.y0 || q.y > t.y1 || t.z <= h) continue;
        if (point_in_polygon(q, t.fp)) {
          h = t.z;
          label = PointLabel::object;
        }
      }
      out.cloud.points.push_back(plane.lift(q) + plane.normal * (h + noise));
      out.labels.push_back(label);
    }
  }

  if (outlier_fraction > 0.0) {
    const double f = std::min(outlier_fraction, 0.95);
    const auto n_out = static_cast<std::size_t>(
        std::llround(f / (1.0 - f) * static_cast<double>(out.cloud.size())));
    for (std::size_t i = 0; i < n_out; ++i) {
      const Point2 q{rng.uniform(x0 - opt.fov_margin, x1 + opt.fov_margin),
                     rng.uniform(y0 - opt.fov_margin, y1 + opt.fov_margin)};
      const double below = point_in_polygon(q, top) ? 0.0 : -opt.floor_depth;
      const double h = rng.uniform(below, camera_height);
      out.cloud.points.push_back(plane.lift(q) + plane.normal * h);
      out.labels.push_back(PointLabel::outlier);
    }
  }
  return out;
}

inline PointCloud3 synth_cloud(const Scene& scene, double camera_height = 0.74,
                               double noise_sigma = 0.002, double outlier_fraction = 0.0,
                               std::uint64_t seed = 0, const SynthOptions& opt = {}) {
  return synth_cloud_labeled(scene, camera_height, noise_sigma, outlier_fraction, seed, opt)
      .cloud;
}

}  // namespace deskorg
