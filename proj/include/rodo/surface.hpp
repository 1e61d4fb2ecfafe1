#pragma once

#include "rodo/geometry.hpp"
#include "rodo/point_grid.hpp"
#include "rodo/prefilter.hpp"

#include <Eigen/Core>

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rodo {

/// Intensity-weighted first and second moments of the points gathered for one grid cell.
struct CellStatistics {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
  int count = 0;
};

using StatisticsGrid = std::map<GridCoord, CellStatistics>;

class SurfaceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Weighted mean and covariance of the columns of `points` with weights (z_j - z_min)
/// normalized to sum one. Throws SurfaceError("zero total weight") if every weight vanishes.
CellStatistics compute_cell_statistics(const Eigen::Matrix2Xd& points, std::span<const double> intensities,
                                       double z_min);

enum class SmoothingMode { None, Gaussian, SymmetricGaussian };

std::string_view to_string(SmoothingMode mode);
/// Accepts "none", "gaussian" and "symmetric".
std::optional<SmoothingMode> parse_smoothing_mode(std::string_view text);

/// The 3x3 binomial kernel (1/16)[1 2 1; 2 4 2; 1 2 1].
const Eigen::Matrix3d& gaussian_kernel();

/// Kernel-times-count weights of the 3x3 neighborhood around `center`, unnormalized. Row i and
/// column j cover the cell (center.x + j - 1, center.y + i - 1); absent cells weigh zero.
Eigen::Matrix3d neighborhood_weights(const StatisticsGrid& grid, const GridCoord& center);

/// True when every weight and its mirror through the center, (i, j) <-> (k-1-i, k-1-j), are
/// either both positive or both zero. `weights` must be square with odd size.
bool symmetric_gate(const Eigen::MatrixXd& weights);

/// Moment-matched merge of the 3x3 neighborhood of `center` using the kernel-times-count
/// weights. A cell with no populated neighbors keeps its own statistics.
CellStatistics gaussian_smooth_cell(const StatisticsGrid& grid, const GridCoord& center);

/// Applies gaussian_smooth_cell to every cell of the grid (single pass, reading the input grid).
StatisticsGrid gaussian_smooth(const StatisticsGrid& grid);

struct SurfaceDiagnostics {
  int occupied_cells = 0;
  int dropped_sparse = 0;      // fewer than min_points neighbors
  int dropped_degenerate = 0;  // zero weight or isotropic covariance
  int smoothed_cells = 0;
  int gate_rejections = 0;     // symmetric mode only
};

/// Smooths per `mode`; None returns the grid unchanged.
StatisticsGrid smooth_grid(const StatisticsGrid& grid, SmoothingMode mode,
                           SurfaceDiagnostics* diagnostics = nullptr);

struct SurfacePoint {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Vector2d normal = Eigen::Vector2d::UnitX();
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
  int point_count = 0;
  double planarity = 0.0;
};

/// log(1 + |lambda_max / lambda_min|); lambda_min is floored at 1e-12 * lambda_max so line-like
/// cells get a large finite value.
double planarity(const Eigen::Matrix2d& covariance);

/// Sparse oriented surface points, at most one per occupied grid cell, sorted by cell.
struct SurfacePointSet {
  std::vector<SurfacePoint> points;
  double grid_resolution_m = 0.0;
  std::map<GridCoord, int> cell_index;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
  std::vector<Eigen::Vector2d> means() const;
  /// Means and normals mapped through `pose`; covariances rotated accordingly.
  SurfacePointSet transformed(const Pose2d& pose) const;
};

struct SurfaceConfig {
  double resolution = 3.5;  // grid cell size and gathering radius r
  int min_points = 2;
  SmoothingMode smoothing = SmoothingMode::None;
};

/// Oriented surface point for one cell, or nullopt when the covariance is degenerate or
/// isotropic. The normal points toward `sensor_origin`.
std::optional<SurfacePoint> make_surface_point(const CellStatistics& stats,
                                               const Eigen::Vector2d& sensor_origin);

/// Gathers, for every occupied cell, the points within `resolution` of the cell center, computes
/// weighted statistics, smooths them and extracts normals.
StatisticsGrid gather_cell_statistics(const PointCloud2D& cloud, const SurfaceConfig& cfg, double z_min,
                                      SurfaceDiagnostics* diagnostics = nullptr);

SurfacePointSet build_surface_points(const PointCloud2D& cloud, const SurfaceConfig& cfg, double z_min,
                                     const Eigen::Vector2d& sensor_origin = Eigen::Vector2d::Zero(),
                                     SurfaceDiagnostics* diagnostics = nullptr);

}  // namespace rodo
