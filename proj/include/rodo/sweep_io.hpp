#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <stdexcept>
#include <vector>

namespace rodo {

class SweepFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One full revolution of a spinning radar: azimuth x range grid of power returns.
struct PolarSweep {
  using Intensities = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Intensities intensities;  // rows: azimuth bins, cols: range bins
  double range_resolution_m = 0.0;
  double sweep_center_time_s = 0.0;
  double sweep_duration_s = 0.0;

  int azimuth_count() const { return static_cast<int>(intensities.rows()); }
  int range_bin_count() const { return static_cast<int>(intensities.cols()); }
  const double* row_data(int azimuth) const { return intensities.data() + azimuth * intensities.cols(); }

  bool operator==(const PolarSweep& other) const = default;
};

/// Throws SweepFormatError if `sweep` breaks a PolarSweep invariant.
void validate_sweep(const PolarSweep& sweep);

PolarSweep make_sweep(PolarSweep::Intensities intensities, double range_resolution_m,
                      double sweep_center_time_s, double sweep_duration_s);

// RPS1 layout: "RPS1\n", "N_a N_r gamma delta_T center_time\n", then N_a*N_r uint8 intensities
// in row-major azimuth order. Intensities are rounded and clamped to [0, 255] on save.
PolarSweep load_sweep(const std::filesystem::path& path);
void save_sweep(const PolarSweep& sweep, const std::filesystem::path& path);

/// Header line (including trailing newline) written for `sweep`.
std::string sweep_header_line(const PolarSweep& sweep);

/// Rounds and clamps intensities to the 8-bit grid the file format can represent.
PolarSweep quantize_sweep(PolarSweep sweep);

/// All `*.rps` files in `dir`, sorted lexicographically.
std::vector<std::filesystem::path> list_sweep_files(const std::filesystem::path& dir);

}  // namespace rodo
