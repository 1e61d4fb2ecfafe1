#include "rodo/prefilter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rodo {

std::vector<int> k_strongest_bins(std::span<const double> row, const FilterConfig& cfg) {
  std::vector<int> candidates;
  const int bins = static_cast<int>(row.size());
  for (int d = std::max(cfg.min_range_bin, 0); d < bins; ++d) {
    if (row[d] > cfg.z_min) candidates.push_back(d);
  }
  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(std::max(cfg.k_strongest, 0)),
                                                 candidates.size());
  const auto stronger = [&row](int a, int b) {
    return row[a] != row[b] ? row[a] > row[b] : a < b;
  };
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                    candidates.end(), stronger);
  candidates.resize(keep);
  std::sort(candidates.begin(), candidates.end());
  return candidates;
}

Eigen::Vector2d polar_to_cartesian(int range_bin, int azimuth, int azimuth_count,
                                   double range_resolution_m) {
  const double theta = 2.0 * std::numbers::pi * azimuth / azimuth_count;
  const double range = range_bin * range_resolution_m;
  return {range * std::cos(theta), range * std::sin(theta)};
}

PointCloud2D k_strongest_filter(const PolarSweep& sweep, const FilterConfig& cfg) {
  PointCloud2D cloud;
  const int azimuths = sweep.azimuth_count();
  const auto bins = static_cast<std::size_t>(sweep.range_bin_count());
  cloud.reserve(static_cast<std::size_t>(azimuths) * static_cast<std::size_t>(std::max(cfg.k_strongest, 0)));
  for (int a = 0; a < azimuths; ++a) {
    const std::span<const double> row(sweep.row_data(a), bins);
    for (int d : k_strongest_bins(row, cfg)) {
      cloud.push_back({polar_to_cartesian(d, a, azimuths, sweep.range_resolution_m), row[d], a});
    }
  }
  return cloud;
}

}  // namespace rodo
