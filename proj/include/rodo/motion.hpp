#pragma once

#include "rodo/geometry.hpp"
#include "rodo/prefilter.hpp"

namespace rodo {

struct CompensationConfig {
  bool enabled = true;
};

/// Capture time of azimuth `azimuth` relative to the sweep center, in [-duration/2, duration/2).
inline double azimuth_time_offset(int azimuth, int azimuth_count, double sweep_duration_s) {
  return (azimuth - azimuth_count / 2.0) * sweep_duration_s / azimuth_count;
}

/// Moves every point into the sweep-center frame under a constant-velocity model: a point
/// captured at offset dt maps to R(dt * omega) * p + dt * v.
PointCloud2D compensate(const PointCloud2D& cloud, const Velocity2d& velocity,
                        double sweep_duration_s, int azimuth_count);

}  // namespace rodo
