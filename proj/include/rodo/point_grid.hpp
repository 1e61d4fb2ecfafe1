#pragma once

#include <Eigen/Core>

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

namespace rodo {

/// Integer coordinate of a square grid cell; orders by x, then y.
struct GridCoord {
  int x = 0;
  int y = 0;
  auto operator<=>(const GridCoord&) const = default;
};

struct GridCoordHash {
  std::size_t operator()(const GridCoord& c) const noexcept {
    const auto ux = static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.x));
    const auto uy = static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.y));
    return std::hash<std::uint64_t>{}((ux << 32) | uy);
  }
};

inline GridCoord cell_of(const Eigen::Vector2d& p, double cell_size) {
  return {static_cast<int>(std::floor(p.x() / cell_size)), static_cast<int>(std::floor(p.y() / cell_size))};
}

inline Eigen::Vector2d cell_center(const GridCoord& c, double cell_size) {
  return {(c.x + 0.5) * cell_size, (c.y + 0.5) * cell_size};
}

/// Hash-grid bucketing of a fixed point set for radius and nearest-neighbor queries.
class PointGrid {
 public:
  PointGrid() = default;
  PointGrid(std::span<const Eigen::Vector2d> points, double cell_size)
      : points_(points.begin(), points.end()), cell_size_(cell_size) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
      buckets_[cell_of(points_[i], cell_size_)].push_back(static_cast<int>(i));
    }
  }

  const std::vector<Eigen::Vector2d>& points() const { return points_; }
  double cell_size() const { return cell_size_; }
  bool empty() const { return points_.empty(); }

  /// Calls fn(index) for every point within `radius` of `query`, in no particular order.
  template <typename Fn>
  void for_each_within(const Eigen::Vector2d& query, double radius, Fn&& fn) const {
    const double r2 = radius * radius;
    visit_candidates(query, radius, [&](int idx) {
      if ((points_[idx] - query).squaredNorm() <= r2) fn(idx);
    });
  }

  /// Index of the closest point within `radius` accepted by `accept`, or -1. Ties go to the
  /// lower index so results do not depend on bucket iteration order.
  template <typename Pred>
  int nearest(const Eigen::Vector2d& query, double radius, Pred&& accept) const {
    int best = -1;
    double best_d2 = radius * radius;
    visit_candidates(query, radius, [&](int idx) {
      const double d2 = (points_[idx] - query).squaredNorm();
      if (d2 > best_d2 || (d2 == best_d2 && best >= 0 && idx > best)) return;
      if (!accept(idx)) return;
      best = idx;
      best_d2 = d2;
    });
    return best;
  }

  int nearest(const Eigen::Vector2d& query, double radius) const {
    return nearest(query, radius, [](int) { return true; });
  }

 private:
  template <typename Fn>
  void visit_candidates(const Eigen::Vector2d& query, double radius, Fn&& fn) const {
    if (points_.empty()) return;
    const GridCoord lo = cell_of(query - Eigen::Vector2d::Constant(radius), cell_size_);
    const GridCoord hi = cell_of(query + Eigen::Vector2d::Constant(radius), cell_size_);
    for (int x = lo.x; x <= hi.x; ++x) {
      for (int y = lo.y; y <= hi.y; ++y) {
        const auto it = buckets_.find({x, y});
        if (it == buckets_.end()) continue;
        for (int idx : it->second) fn(idx);
      }
    }
  }

  std::vector<Eigen::Vector2d> points_;
  double cell_size_ = 1.0;
  std::unordered_map<GridCoord, std::vector<int>, GridCoordHash> buckets_;
};

}  // namespace rodo
