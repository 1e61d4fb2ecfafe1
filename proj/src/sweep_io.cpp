#include "rodo/sweep_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <locale>
#include <sstream>

namespace rodo {

namespace {

constexpr char kMagic[] = "RPS1\n";
constexpr std::size_t kMagicSize = sizeof(kMagic) - 1;

}  // namespace

void validate_sweep(const PolarSweep& sweep) {
  if (sweep.intensities.rows() <= 0 || sweep.intensities.cols() <= 0) {
    throw SweepFormatError("sweep dimensions must be positive");
  }
  if (!(sweep.range_resolution_m > 0.0) || !std::isfinite(sweep.range_resolution_m)) {
    throw SweepFormatError("non-positive range resolution");
  }
  if (!(sweep.sweep_duration_s > 0.0) || !std::isfinite(sweep.sweep_duration_s)) {
    throw SweepFormatError("non-positive sweep duration");
  }
  if (!std::isfinite(sweep.sweep_center_time_s)) {
    throw SweepFormatError("non-finite sweep center time");
  }
  if (!sweep.intensities.allFinite() || (sweep.intensities.array() < 0.0).any()) {
    throw SweepFormatError("intensities must be finite and non-negative");
  }
}

PolarSweep make_sweep(PolarSweep::Intensities intensities, double range_resolution_m,
                      double sweep_center_time_s, double sweep_duration_s) {
  PolarSweep sweep;
  sweep.intensities = std::move(intensities);
  sweep.range_resolution_m = range_resolution_m;
  sweep.sweep_center_time_s = sweep_center_time_s;
  sweep.sweep_duration_s = sweep_duration_s;
  validate_sweep(sweep);
  return sweep;
}

std::string sweep_header_line(const PolarSweep& sweep) {
  // {} prints the shortest representation that round-trips exactly.
  return fmt::format("{} {} {} {} {}\n", sweep.azimuth_count(), sweep.range_bin_count(),
                     sweep.range_resolution_m, sweep.sweep_duration_s, sweep.sweep_center_time_s);
}

PolarSweep quantize_sweep(PolarSweep sweep) {
  sweep.intensities = sweep.intensities.array().round().max(0.0).min(255.0).matrix();
  return sweep;
}

void save_sweep(const PolarSweep& sweep, const std::filesystem::path& path) {
  validate_sweep(sweep);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SweepFormatError(fmt::format("cannot open {} for writing", path.string()));

  const std::string header = sweep_header_line(sweep);
  out.write(kMagic, kMagicSize);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));

  std::vector<unsigned char> payload(static_cast<std::size_t>(sweep.intensities.size()));
  const double* src = sweep.intensities.data();
  for (std::size_t i = 0; i < payload.size(); ++i) {
    payload[i] = static_cast<unsigned char>(std::clamp(std::round(src[i]), 0.0, 255.0));
  }
  out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (!out) throw SweepFormatError(fmt::format("failed writing {}", path.string()));
}

PolarSweep load_sweep(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SweepFormatError(fmt::format("cannot open {}", path.string()));

  std::string magic(kMagicSize, '\0');
  in.read(magic.data(), static_cast<std::streamsize>(kMagicSize));
  if (!in || magic != kMagic) throw SweepFormatError("bad magic");

  std::string header;
  if (!std::getline(in, header)) throw SweepFormatError("missing header line");

  std::istringstream fields(header);
  fields.imbue(std::locale::classic());
  long long azimuths = 0;
  long long bins = 0;
  double gamma = 0.0;
  double duration = 0.0;
  double center = 0.0;
  fields >> azimuths >> bins >> gamma >> duration >> center;
  if (fields.fail()) throw SweepFormatError("malformed header line");
  std::string trailing;
  if (fields >> trailing) throw SweepFormatError("malformed header line");
  if (azimuths <= 0 || bins <= 0) throw SweepFormatError("non-positive sweep dimensions");
  if (!(gamma > 0.0)) throw SweepFormatError("non-positive range resolution");
  if (!(duration > 0.0)) throw SweepFormatError("non-positive sweep duration");

  const std::vector<unsigned char> payload((std::istreambuf_iterator<char>(in)),
                                           std::istreambuf_iterator<char>());
  if (payload.size() != static_cast<std::size_t>(azimuths * bins)) {
    throw SweepFormatError(fmt::format("payload size mismatch: expected {} bytes, found {}",
                                       azimuths * bins, payload.size()));
  }

  PolarSweep::Intensities intensities(azimuths, bins);
  double* dst = intensities.data();
  for (std::size_t i = 0; i < payload.size(); ++i) dst[i] = payload[i];
  return make_sweep(std::move(intensities), gamma, center, duration);
}

std::vector<std::filesystem::path> list_sweep_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".rps") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace rodo
