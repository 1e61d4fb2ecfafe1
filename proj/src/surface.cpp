#include "rodo/surface.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace rodo {

namespace {

constexpr double kIsotropyRatio = 1.0 + 1e-6;
constexpr double kPlanarityFloor = 1e-12;

Eigen::Matrix2d symmetrized(const Eigen::Matrix2d& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

CellStatistics compute_cell_statistics(const Eigen::Matrix2Xd& points, std::span<const double> intensities,
                                       double z_min) {
  if (points.cols() == 0 || static_cast<std::size_t>(points.cols()) != intensities.size()) {
    throw SurfaceError("point and intensity counts differ or are empty");
  }
  Eigen::VectorXd weights(points.cols());
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    weights(j) = std::max(intensities[static_cast<std::size_t>(j)] - z_min, 0.0);
  }
  const double total = weights.sum();
  if (!(total > 0.0)) throw SurfaceError("zero total weight");
  weights /= total;

  CellStatistics stats;
  stats.count = static_cast<int>(points.cols());
  stats.mean = points * weights;
  const Eigen::Matrix2Xd centered = points.colwise() - stats.mean;
  stats.covariance = symmetrized(centered * weights.asDiagonal() * centered.transpose());
  return stats;
}

std::string_view to_string(SmoothingMode mode) {
  switch (mode) {
    case SmoothingMode::None:
      return "none";
    case SmoothingMode::Gaussian:
      return "gaussian";
    case SmoothingMode::SymmetricGaussian:
      return "symmetric";
  }
  return "none";
}

std::optional<SmoothingMode> parse_smoothing_mode(std::string_view text) {
  if (text == "none") return SmoothingMode::None;
  if (text == "gaussian") return SmoothingMode::Gaussian;
  if (text == "symmetric") return SmoothingMode::SymmetricGaussian;
  return std::nullopt;
}

const Eigen::Matrix3d& gaussian_kernel() {
  static const Eigen::Matrix3d kernel = [] {
    Eigen::Matrix3d k;
    k << 1, 2, 1, 2, 4, 2, 1, 2, 1;
    return Eigen::Matrix3d(k / 16.0);
  }();
  return kernel;
}

Eigen::Matrix3d neighborhood_weights(const StatisticsGrid& grid, const GridCoord& center) {
  Eigen::Matrix3d weights = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const auto it = grid.find({center.x + j - 1, center.y + i - 1});
      if (it != grid.end()) weights(i, j) = gaussian_kernel()(i, j) * it->second.count;
    }
  }
  return weights;
}

bool symmetric_gate(const Eigen::MatrixXd& weights) {
  const Eigen::Index k = weights.rows();
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < weights.cols(); ++j) {
      const double w = weights(i, j);
      const double mirror = weights(k - 1 - i, weights.cols() - 1 - j);
      const bool both_positive = w > 0.0 && mirror > 0.0;
      const bool both_zero = w == 0.0 && mirror == 0.0;
      if (!both_positive && !both_zero) return false;
    }
  }
  return true;
}

CellStatistics gaussian_smooth_cell(const StatisticsGrid& grid, const GridCoord& center) {
  const auto self = grid.find(center);
  const Eigen::Matrix3d weights = neighborhood_weights(grid, center);
  const double total = weights.sum();
  if (!(total > 0.0)) {
    return self != grid.end() ? self->second : CellStatistics{};
  }

  // accumulate deviations from an anchor cell, so identical neighbours reproduce it bit for bit
  const CellStatistics* anchor = self != grid.end() ? &self->second : nullptr;
  for (int k = 0; k < 9 && !anchor; ++k)
    if (weights(k / 3, k % 3) != 0.0) anchor = &grid.at({center.x + k % 3 - 1, center.y + k / 3 - 1});

  Eigen::Vector2d shift = Eigen::Vector2d::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (weights(i, j) == 0.0) continue;
      const CellStatistics& s = grid.at({center.x + j - 1, center.y + i - 1});
      shift += (weights(i, j) / total) * (s.mean - anchor->mean);
    }
  }
  CellStatistics out;
  out.count = self != grid.end() ? self->second.count : 0;
  out.mean = anchor->mean + shift;
  Eigen::Matrix2d spread = Eigen::Matrix2d::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (weights(i, j) == 0.0) continue;
      const CellStatistics& s = grid.at({center.x + j - 1, center.y + i - 1});
      const Eigen::Vector2d offset = (s.mean - anchor->mean) - shift;
      spread += (weights(i, j) / total) * ((s.covariance - anchor->covariance) + offset * offset.transpose());
    }
  }
  out.covariance = anchor->covariance + spread;
  out.covariance = symmetrized(out.covariance);
  return out;
}

StatisticsGrid gaussian_smooth(const StatisticsGrid& grid) {
  StatisticsGrid out;
  for (const auto& [coord, stats] : grid) out.emplace(coord, gaussian_smooth_cell(grid, coord));
  return out;
}

StatisticsGrid smooth_grid(const StatisticsGrid& grid, SmoothingMode mode, SurfaceDiagnostics* diagnostics) {
  if (mode == SmoothingMode::None) return grid;
  StatisticsGrid out;
  for (const auto& [coord, stats] : grid) {
    if (mode == SmoothingMode::SymmetricGaussian && !symmetric_gate(neighborhood_weights(grid, coord))) {
      out.emplace(coord, stats);
      if (diagnostics) ++diagnostics->gate_rejections;
      continue;
    }
    out.emplace(coord, gaussian_smooth_cell(grid, coord));
    if (diagnostics) ++diagnostics->smoothed_cells;
  }
  return out;
}

double planarity(const Eigen::Matrix2d& covariance) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver;
  solver.computeDirect(symmetrized(covariance), Eigen::EigenvaluesOnly);
  const double lambda_min = solver.eigenvalues()(0);
  const double lambda_max = solver.eigenvalues()(1);
  const double denominator = std::max(std::abs(lambda_min), kPlanarityFloor * std::abs(lambda_max));
  if (denominator == 0.0) return 0.0;
  return std::log1p(std::abs(lambda_max / denominator));
}

std::optional<SurfacePoint> make_surface_point(const CellStatistics& stats, const Eigen::Vector2d& sensor_origin) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver;
  solver.computeDirect(stats.covariance);
  const double lambda_min = solver.eigenvalues()(0);
  const double lambda_max = solver.eigenvalues()(1);
  if (!(lambda_max > 0.0) || !stats.covariance.allFinite()) return std::nullopt;
  if (lambda_min > 0.0 && lambda_max / lambda_min < kIsotropyRatio) return std::nullopt;

  SurfacePoint point;
  point.mean = stats.mean;
  point.covariance = stats.covariance;
  point.point_count = stats.count;
  point.normal = solver.eigenvectors().col(0).normalized();
  if (point.normal.dot(sensor_origin - point.mean) < 0.0) point.normal = -point.normal;
  point.planarity = planarity(stats.covariance);
  return point;
}

std::vector<Eigen::Vector2d> SurfacePointSet::means() const {
  std::vector<Eigen::Vector2d> out;
  out.reserve(points.size());
  for (const SurfacePoint& p : points) out.push_back(p.mean);
  return out;
}

SurfacePointSet SurfacePointSet::transformed(const Pose2d& pose) const {
  SurfacePointSet out = *this;
  const Eigen::Matrix2d rot = pose.rotation();
  for (SurfacePoint& p : out.points) {
    p.mean = pose * p.mean;
    p.normal = rot * p.normal;
    p.covariance = rot * p.covariance * rot.transpose();
  }
  return out;
}

StatisticsGrid gather_cell_statistics(const PointCloud2D& cloud, const SurfaceConfig& cfg, double z_min,
                                      SurfaceDiagnostics* diagnostics) {
  std::vector<Eigen::Vector2d> positions;
  positions.reserve(cloud.size());
  for (const RadarPoint& p : cloud) positions.push_back(p.position);
  const PointGrid grid(positions, cfg.resolution);

  std::vector<GridCoord> occupied;
  occupied.reserve(positions.size());
  for (const Eigen::Vector2d& p : positions) occupied.push_back(cell_of(p, cfg.resolution));
  std::sort(occupied.begin(), occupied.end());
  occupied.erase(std::unique(occupied.begin(), occupied.end()), occupied.end());
  if (diagnostics) diagnostics->occupied_cells += static_cast<int>(occupied.size());

  StatisticsGrid stats;
  std::vector<int> members;
  std::vector<double> intensities;
  for (const GridCoord& coord : occupied) {
    members.clear();
    grid.for_each_within(cell_center(coord, cfg.resolution), cfg.resolution,
                         [&members](int idx) { members.push_back(idx); });
    if (static_cast<int>(members.size()) < cfg.min_points) {
      if (diagnostics) ++diagnostics->dropped_sparse;
      continue;
    }
    std::sort(members.begin(), members.end());
    Eigen::Matrix2Xd pts(2, static_cast<Eigen::Index>(members.size()));
    intensities.resize(members.size());
    for (std::size_t m = 0; m < members.size(); ++m) {
      pts.col(static_cast<Eigen::Index>(m)) = positions[static_cast<std::size_t>(members[m])];
      intensities[m] = cloud[static_cast<std::size_t>(members[m])].intensity;
    }
    try {
      stats.emplace(coord, compute_cell_statistics(pts, intensities, z_min));
    } catch (const SurfaceError&) {
      if (diagnostics) ++diagnostics->dropped_degenerate;
    }
  }
  return stats;
}

SurfacePointSet build_surface_points(const PointCloud2D& cloud, const SurfaceConfig& cfg, double z_min,
                                     const Eigen::Vector2d& sensor_origin, SurfaceDiagnostics* diagnostics) {
  const StatisticsGrid raw = gather_cell_statistics(cloud, cfg, z_min, diagnostics);
  const StatisticsGrid smoothed = smooth_grid(raw, cfg.smoothing, diagnostics);

  SurfacePointSet set;
  set.grid_resolution_m = cfg.resolution;
  for (const auto& [coord, stats] : smoothed) {
    std::optional<SurfacePoint> point = make_surface_point(stats, sensor_origin);
    if (!point) {
      if (diagnostics) ++diagnostics->dropped_degenerate;
      continue;
    }
    set.cell_index.emplace(coord, static_cast<int>(set.points.size()));
    set.points.push_back(*point);
  }
  return set;
}

}  // namespace rodo
