#pragma once

// Static kd-tree over points in R^3 (planar inputs keep z == 0).

#include "capcover/types.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace capcover {

class KdTree {
 public:
  KdTree() = default;

  explicit KdTree(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
    index_.resize(points_.size());
    std::iota(index_.begin(), index_.end(), 0);
    if (!points_.empty()) build(0, static_cast<int>(index_.size()));
  }

  std::size_t size() const { return points_.size(); }
  const Vec3& point(int i) const { return points_[i]; }

  struct Hit {
    int index = -1;
    double dist2 = std::numeric_limits<double>::infinity();
  };

  /// Euclidean nearest neighbour; ties go to the lowest index.
  Hit nearest(const Vec3& q) const {
    Hit best;
    if (!nodes_.empty()) nearest_rec(0, q, best);
    return best;
  }

  /// Calls visit(index, dist2) for every point with |p - q| <= radius.
  template <class Visit>
  void within(const Vec3& q, double radius, Visit&& visit) const {
    if (nodes_.empty()) return;
    const double r2 = radius * radius;
    int stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
      const Node& nd = nodes_[stack[--top]];
      if (nd.axis < 0) {
        for (int k = nd.begin; k < nd.end; ++k) {
          const int i = index_[k];
          const double d2 = (points_[i] - q).squaredNorm();
          if (d2 <= r2) visit(i, d2);
        }
        continue;
      }
      const double diff = q(nd.axis) - nd.split;
      if (diff - radius <= 0.0) stack[top++] = nd.left;
      if (diff + radius >= 0.0) stack[top++] = nd.right;
    }
  }

 private:
  static constexpr int kLeafSize = 8;

  struct Node {
    int axis = -1;  // -1 for leaves
    double split = 0.0;
    int left = -1, right = -1;
    int begin = 0, end = 0;
  };

  int build(int begin, int end) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    if (end - begin <= kLeafSize) return id;
    Vec3 lo = points_[index_[begin]], hi = lo;
    for (int k = begin; k < end; ++k) {
      lo = lo.cwiseMin(points_[index_[k]]);
      hi = hi.cwiseMax(points_[index_[k]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    const int mid = begin + (end - begin) / 2;
    std::nth_element(index_.begin() + begin, index_.begin() + mid, index_.begin() + end,
                     [&](int a, int b) { return points_[a](axis) < points_[b](axis); });
    const double split = points_[index_[mid]](axis);
    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void nearest_rec(int id, const Vec3& q, Hit& best) const {
    const Node& nd = nodes_[id];
    if (nd.axis < 0) {
      for (int k = nd.begin; k < nd.end; ++k) {
        const int i = index_[k];
        const double d2 = (points_[i] - q).squaredNorm();
        if (d2 < best.dist2 || (d2 == best.dist2 && i < best.index)) best = {i, d2};
      }
      return;
    }
    const double diff = q(nd.axis) - nd.split;
    const int first = diff <= 0.0 ? nd.left : nd.right;
    const int second = diff <= 0.0 ? nd.right : nd.left;
    nearest_rec(first, q, best);
    if (diff * diff <= best.dist2) nearest_rec(second, q, best);
  }

  std::vector<Vec3> points_;
  std::vector<int> index_;
  std::vector<Node> nodes_;
};

}  // namespace capcover
