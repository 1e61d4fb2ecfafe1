#include "rodo/motion.hpp"

namespace rodo {

PointCloud2D compensate(const PointCloud2D& cloud, const Velocity2d& velocity,
                        double sweep_duration_s, int azimuth_count) {
  PointCloud2D out = cloud;
  if (velocity.is_zero()) return out;
  for (RadarPoint& point : out) {
    const double dt = azimuth_time_offset(point.azimuth_index, azimuth_count, sweep_duration_s);
    if (dt == 0.0) continue;
    point.position = velocity.displacement(dt) * point.position;
  }
  return out;
}

}  // namespace rodo
