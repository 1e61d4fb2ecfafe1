#pragma once

#include "rodo/sweep_io.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace rodo {

struct FilterConfig {
  int k_strongest = 12;
  double z_min = 55.0;    // same scale as sweep intensities
  int min_range_bin = 0;  // bins below this index are discarded
};

struct RadarPoint {
  Eigen::Vector2d position;
  double intensity = 0.0;
  int azimuth_index = 0;
};

using PointCloud2D = std::vector<RadarPoint>;

/// Range-bin indices kept for one azimuth row, ascending. A bin survives if it is among the k
/// highest returns above z_min; equal intensities prefer the lower bin.
std::vector<int> k_strongest_bins(std::span<const double> row, const FilterConfig& cfg);

/// Cartesian position of range bin `range_bin` on azimuth `azimuth` (angle 2*pi*a/N_a).
Eigen::Vector2d polar_to_cartesian(int range_bin, int azimuth, int azimuth_count,
                                   double range_resolution_m);

/// Per-azimuth k-strongest filtering followed by polar to Cartesian conversion. Output is
/// ordered by azimuth, then by ascending range.
PointCloud2D k_strongest_filter(const PolarSweep& sweep, const FilterConfig& cfg);

}  // namespace rodo
