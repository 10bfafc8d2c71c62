#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <utility>
#include <vector>

#include "deskorg/table.hpp"

namespace deskorg::detail {

// Static 3-d tree over a borrowed point array, bucket leaves.
class KdTree3 {
 public:
  explicit KdTree3(const std::vector<Vec3>& pts) : pts_(pts), idx_(pts.size()) {
    for (std::size_t i = 0; i < idx_.size(); ++i) idx_[i] = static_cast<std::uint32_t>(i);
    if (!idx_.empty()) build(0, static_cast<std::uint32_t>(idx_.size()));
  }

  // Up to k nearest neighbours of q other than `self`, as (squared distance,
  // index) sorted ascending.
  std::vector<std::pair<double, std::size_t>> knn(const Vec3& q, std::size_t k,
                                                  std::size_t self) const {
    Heap heap;
    if (!nodes_.empty()) knn_rec(0, q, k, self, heap);
    std::vector<std::pair<double, std::size_t>> out;
    out.reserve(heap.size());
    while (!heap.empty()) {
      out.push_back(heap.top());
      heap.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  // Number of points other than `self` within radius r (stops at `cap`).
  std::size_t radius_count(const Vec3& q, double r, std::size_t self,
                           std::size_t cap) const {
    std::size_t count = 0;
    if (!nodes_.empty()) radius_rec(0, q, r * r, self, cap, count);
    return count;
  }

 private:
  using Heap = std::priority_queue<std::pair<double, std::size_t>>;

  struct Node {
    std::uint32_t begin = 0, end = 0;
    int axis = -1;  // -1 = leaf
    double split = 0.0;
    std::int32_t left = -1, right = -1;
  };

  static double coord(const Vec3& p, int axis) {
    return axis == 0 ? p.x : (axis == 1 ? p.y : p.z);
  }
  static double dist2(const Vec3& a, const Vec3& b) {
    const Vec3 d = a - b;
    return dot(d, d);
  }

  std::int32_t build(std::uint32_t begin, std::uint32_t end) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({begin, end});
    if (end - begin <= kLeaf) return id;
    Vec3 lo = pts_[idx_[begin]], hi = lo;
    for (std::uint32_t i = begin; i < end; ++i) {
      const Vec3& p = pts_[idx_[i]];
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    const Vec3 ext = hi - lo;
    const int axis = ext.x >= ext.y && ext.x >= ext.z ? 0 : (ext.y >= ext.z ? 1 : 2);
    if (coord(ext, axis) <= 0.0) return id;
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(idx_.begin() + begin, idx_.begin() + mid, idx_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                       const double ca = coord(pts_[a], axis), cb = coord(pts_[b], axis);
                       return ca < cb || (ca == cb && a < b);
                     });
    nodes_[id].axis = axis;
    nodes_[id].split = coord(pts_[idx_[mid]], axis);
    const std::int32_t l = build(begin, mid);
    const std::int32_t r = build(mid, end);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  void knn_rec(std::int32_t n, const Vec3& q, std::size_t k, std::size_t self,
               Heap& heap) const {
    const Node& node = nodes_[n];
    if (node.axis < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const std::size_t j = idx_[i];
        if (j == self) continue;
        const double d = dist2(q, pts_[j]);
        if (heap.size() < k) {
          heap.push({d, j});
        } else if (d < heap.top().first) {
          heap.pop();
          heap.push({d, j});
        }
      }
      return;
    }
    const double diff = coord(q, node.axis) - node.split;
    const std::int32_t near = diff < 0 ? node.left : node.right;
    const std::int32_t far = diff < 0 ? node.right : node.left;
    knn_rec(near, q, k, self, heap);
    if (heap.size() < k || diff * diff < heap.top().first) knn_rec(far, q, k, self, heap);
  }

  void radius_rec(std::int32_t n, const Vec3& q, double r2, std::size_t self,
                  std::size_t cap, std::size_t& count) const {
    if (count >= cap) return;
    const Node& node = nodes_[n];
    if (node.axis < 0) {
      for (std::uint32_t i = node.begin; i < node.end && count < cap; ++i) {
        const std::size_t j = idx_[i];
        if (j != self && dist2(q, pts_[j]) <= r2) ++count;
      }
      return;
    }
    const double diff = coord(q, node.axis) - node.split;
    const std::int32_t near = diff < 0 ? node.left : node.right;
    const std::int32_t far = diff < 0 ? node.right : node.left;
    radius_rec(near, q, r2, self, cap, count);
    if (diff * diff <= r2) radius_rec(far, q, r2, self, cap, count);
  }

  static constexpr std::uint32_t kLeaf = 16;
  const std::vector<Vec3>& pts_;
  std::vector<std::uint32_t> idx_;
  std::vector<Node> nodes_;
};

}  // namespace deskorg::detail
