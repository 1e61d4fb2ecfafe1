#include "rodo/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace rodo {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(fmt::format("invalid value '{}' for {}", text, key));
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError(fmt::format("invalid boolean '{}' for {}", text, key));
}

struct Entry {
  std::string key;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

Entry make_int(std::string key, std::function<int&(RunConfig&)> ref) {
  return {key,
          [key, ref](RunConfig& c, std::string_view v) { ref(c) = parse_number<int>(key, v); },
          [ref](const RunConfig& c) {
            RunConfig copy = c;
            return fmt::format("{}", ref(copy));
          }};
}

Entry make_double(std::string key, std::function<double&(RunConfig&)> ref) {
  return {key,
          [key, ref](RunConfig& c, std::string_view v) { ref(c) = parse_number<double>(key, v); },
          [ref](const RunConfig& c) {
            RunConfig copy = c;
            return fmt::format("{}", ref(copy));
          }};
}

Entry make_bool(std::string key, std::function<bool&(RunConfig&)> ref) {
  return {key,
          [key, ref](RunConfig& c, std::string_view v) { ref(c) = parse_bool(key, v); },
          [ref](const RunConfig& c) {
            RunConfig copy = c;
            return std::string(ref(copy) ? "true" : "false");
          }};
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    t.push_back(make_int("filter.k", [](RunConfig& c) -> int& { return c.odometry.filter.k_strongest; }));
    t.push_back(make_double("filter.z_min", [](RunConfig& c) -> double& { return c.odometry.filter.z_min; }));
    t.push_back(make_int("filter.min_range_bin", [](RunConfig& c) -> int& { return c.odometry.filter.min_range_bin; }));
    t.push_back(make_bool("motion.compensate", [](RunConfig& c) -> bool& { return c.odometry.motion.enabled; }));
    t.push_back(make_double("surface.resolution", [](RunConfig& c) -> double& { return c.odometry.surface.resolution; }));
    t.push_back(make_int("surface.min_points", [](RunConfig& c) -> int& { return c.odometry.surface.min_points; }));
    t.push_back({"surface.smoothing",
                 [](RunConfig& c, std::string_view v) {
                   const auto mode = parse_smoothing_mode(v);
                   if (!mode) throw ConfigError(fmt::format("invalid smoothing mode '{}' (none|gaussian|symmetric)", v));
                   c.odometry.surface.smoothing = *mode;
                 },
                 [](const RunConfig& c) { return std::string(to_string(c.odometry.surface.smoothing)); }});
    t.push_back(make_bool("surface.odometry_frame_grid", [](RunConfig& c) -> bool& { return c.odometry.odometry_frame_grid; }));
    t.push_back(make_double("register.radius",
                            [](RunConfig& c) -> double& { return c.odometry.registration.correspondence_radius_m; }));
    t.push_back(make_double("register.huber_delta",
                            [](RunConfig& c) -> double& { return c.odometry.registration.huber_delta; }));
    t.push_back(make_int("register.max_iters", [](RunConfig& c) -> int& { return c.odometry.registration.max_iterations; }));
    t.push_back(make_double("register.tol", [](RunConfig& c) -> double& { return c.odometry.registration.convergence_tol; }));
    t.push_back({"register.min_corr",
                 [](RunConfig& c, std::string_view v) {
                   const int n = parse_number<int>("register.min_corr", v);
                   c.odometry.registration.min_correspondences = n;
                   c.odometry.icp.min_correspondences = n;
                 },
                 [](const RunConfig& c) { return fmt::format("{}", c.odometry.registration.min_correspondences); }});
    t.push_back(make_bool("icp.enabled", [](RunConfig& c) -> bool& { return c.odometry.icp.enabled; }));
    t.push_back(make_double("icp.fitness_threshold",
                            [](RunConfig& c) -> double& { return c.odometry.icp.fitness_threshold; }));
    t.push_back(make_double("icp.max_corr_dist", [](RunConfig& c) -> double& { return c.odometry.icp.max_corr_dist; }));
    t.push_back(make_int("icp.max_iters", [](RunConfig& c) -> int& { return c.odometry.icp.max_iterations; }));
    t.push_back(make_int("keyframe.window", [](RunConfig& c) -> int& { return c.odometry.keyframes.window_size; }));
    t.push_back(make_double("keyframe.min_translation",
                            [](RunConfig& c) -> double& { return c.odometry.keyframes.min_translation_m; }));
    t.push_back({"keyframe.min_rotation_deg",
                 [](RunConfig& c, std::string_view v) {
                   c.odometry.keyframes.min_rotation_rad =
                       parse_number<double>("keyframe.min_rotation_deg", v) * std::numbers::pi / 180.0;
                 },
                 [](const RunConfig& c) {
                   return fmt::format("{}", c.odometry.keyframes.min_rotation_rad * 180.0 / std::numbers::pi);
                 }});
    return t;
  }();
  return table;
}

const Entry& find_entry(std::string_view key) {
  const auto& table = entries();
  const auto it = std::find_if(table.begin(), table.end(), [key](const Entry& e) { return e.key == key; });
  if (it == table.end()) throw ConfigError(fmt::format("unknown config key '{}'", key));
  return *it;
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const Entry& e : entries()) keys.push_back(e.key);
  return keys;
}

void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  find_entry(trim(key)).set(cfg, trim(value));
}

std::string get_config_value(const RunConfig& cfg, std::string_view key) { return find_entry(key).get(cfg); }

void apply_config_text(RunConfig& cfg, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("line {}: expected 'section.key = value'", line_no));
    }
    try {
      set_config_value(cfg, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file {}", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  RunConfig cfg;
  apply_config_text(cfg, buffer.str());
  validate_config(cfg);
  return cfg;
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError(fmt::format("override '{}' must look like section.key=value", assignment));
  }
  set_config_value(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

void validate_config(const RunConfig& cfg) {
  const OdometryConfig& o = cfg.odometry;
  const auto require = [](bool ok, std::string_view what) {
    if (!ok) throw ConfigError(fmt::format("invalid configuration: {}", what));
  };
  require(o.filter.k_strongest >= 1, "filter.k must be >= 1");
  require(o.filter.z_min >= 0.0, "filter.z_min must be >= 0");
  require(o.filter.min_range_bin >= 0, "filter.min_range_bin must be >= 0");
  require(o.surface.resolution > 0.0, "surface.resolution must be > 0");
  require(o.surface.min_points >= 2, "surface.min_points must be >= 2");
  require(o.registration.correspondence_radius_m > 0.0, "register.radius must be > 0");
  require(o.registration.huber_delta > 0.0, "register.huber_delta must be > 0");
  require(o.registration.max_iterations > 0, "register.max_iters must be > 0");
  require(o.registration.convergence_tol > 0.0, "register.tol must be > 0");
  require(o.registration.min_correspondences > 0, "register.min_corr must be > 0");
  require(o.icp.fitness_threshold > 0.0, "icp.fitness_threshold must be > 0");
  require(o.icp.max_corr_dist > 0.0, "icp.max_corr_dist must be > 0");
  require(o.icp.max_iterations > 0, "icp.max_iters must be > 0");
  require(o.keyframes.window_size >= 1, "keyframe.window must be >= 1");
  require(o.keyframes.min_translation_m > 0.0, "keyframe.min_translation must be > 0");
  require(o.keyframes.min_rotation_rad > 0.0, "keyframe.min_rotation_deg must be > 0");
}

std::string dump_config(const RunConfig& cfg) {
  std::string out;
  std::string section;
  for (const Entry& e : entries()) {
    const std::string current = e.key.substr(0, e.key.find('.'));
    if (current != section) {
      if (!section.empty()) out += '\n';
      out += fmt::format("# {}\n", current);
      section = current;
    }
    out += fmt::format("{} = {}\n", e.key, e.get(cfg));
  }
  return out;
}

}  // namespace rodo
