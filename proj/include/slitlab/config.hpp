#pragma once

// Run configuration as flat `key = value` text. Lines starting with '#' are
// comments. Every key is optional; omitted keys keep the apparatus defaults.
//
//   key                        unit   default
//   slit_width_m               m      124e-6
//   wavelength_m               m      632.82e-9
//   screen_distance_m          m      0.257
//   slit_width_offset_m        m      0        (rendering only)
//   screen_distance_offset_m   m      0        (rendering only)
//   pixel_count                -      2048
//   pixel_pitch_m              m      14e-6
//   exposure_s                 s      1.25e-3
//   center_pixel               px     pixel_count / 2
//   baseline_V                 V      1.4e-3
//   baseline_spread_V          V      0.4e-3
//   prnu_spread_V              V      0.4e-3
//   read_noise_V               V      0.2e-3
//   max_voltage_V              V      4.5
//   peak_scale_V               V      4.0
//   shot_noise_fraction        -      0.01
//   frames                     -      1500
//   seed                       -      42
//   voltage_cap                -      134217728
//   guard_pixels               -      64
//   window_correction          bool   true
//   baseline_override_V        V      (unset: estimate in situ)

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "slitlab/analysis.hpp"
#include "slitlab/ccd_sim.hpp"
#include "slitlab/errors.hpp"
#include "slitlab/format.hpp"
#include "slitlab/frame_io.hpp"

namespace slitlab {

struct RunConfig {
  SensorModel sensor;
  BeamModel beam;
  std::uint32_t frames = 1500;
  std::uint64_t seed = 42;
  std::uint64_t voltage_cap = kDefaultVoltageCap;
  std::uint32_t guard_pixels = 64;
  bool window_correction = true;
  std::optional<double> baseline_override;
  bool center_explicit = false;  // center_pixel given rather than derived from pixel_count

  AnalysisOptions analysis_options() const {
    AnalysisOptions o;
    o.guard_pixels = guard_pixels;
    o.baseline_override = baseline_override;
    o.window_correction = window_correction;
    o.baseline_spread = sensor.baseline_spread;
    return o;
  }

  void validate() const {
    sensor.validate();
    beam.validate(sensor);
    if (frames < 1) throw ConfigError("frames", 0, "must be >= 1");
    if (guard_pixels < 8 || guard_pixels > sensor.pixel_count / 8)
      throw ConfigError("guard_pixels", 0, "must lie in [8, pixel_count / 8]");
  }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

struct Geometry3 {
  double width, wavelength, distance;
};

}  // namespace detail

/// Applies one key to the configuration. Throws ConfigError naming the key.
inline void set_config_value(RunConfig& c, detail::Geometry3& g, const std::string& key, std::string_view value,
                             std::size_t line) {
  const auto real = [&]() {
    auto v = parse_double(value);
    if (!v || !std::isfinite(*v)) throw ConfigError(key, line, "expected a finite number, got '" + std::string(value) + "'");
    return *v;
  };
  const auto uint = [&](std::uint64_t max) {
    auto v = parse_u64(value);
    if (!v || *v > max) throw ConfigError(key, line, "expected an unsigned integer, got '" + std::string(value) + "'");
    return *v;
  };
  if (key == "slit_width_m") g.width = real();
  else if (key == "wavelength_m") g.wavelength = real();
  else if (key == "screen_distance_m") g.distance = real();
  else if (key == "slit_width_offset_m") c.beam.slit_width_offset = real();
  else if (key == "screen_distance_offset_m") c.beam.screen_distance_offset = real();
  else if (key == "pixel_count") c.sensor.pixel_count = static_cast<std::uint32_t>(uint(0xFFFFFFFFu));
  else if (key == "pixel_pitch_m") c.sensor.pixel_pitch = real();
  else if (key == "exposure_s") c.sensor.exposure = real();
  else if (key == "center_pixel") {
    c.sensor.center_pixel = real();
    c.center_explicit = true;
  } else if (key == "baseline_V") c.sensor.baseline_voltage = real();
  else if (key == "baseline_spread_V") c.sensor.baseline_spread = real();
  else if (key == "prnu_spread_V") c.sensor.prnu_spread = real();
  else if (key == "read_noise_V") c.sensor.read_noise_sigma = real();
  else if (key == "max_voltage_V") c.sensor.max_voltage = real();
  else if (key == "peak_scale_V") c.beam.peak_scale = real();
  else if (key == "shot_noise_fraction") c.beam.shot_noise_fraction = real();
  else if (key == "frames") c.frames = static_cast<std::uint32_t>(uint(0xFFFFFFFFu));
  else if (key == "seed") c.seed = uint(~std::uint64_t{0});
  else if (key == "voltage_cap") c.voltage_cap = uint(~std::uint64_t{0});
  else if (key == "guard_pixels") c.guard_pixels = static_cast<std::uint32_t>(uint(0xFFFFFFFFu));
  else if (key == "window_correction") {
    if (value == "true") c.window_correction = true;
    else if (value == "false") c.window_correction = false;
    else throw ConfigError(key, line, "expected true or false");
  } else if (key == "baseline_override_V") c.baseline_override = real();
  else throw ConfigError(key, line, "unknown key");
}

inline RunConfig parse_config(std::string_view text) {
  RunConfig c;
  detail::Geometry3 g{c.beam.geometry.slit_width(), c.beam.geometry.wavelength(), c.beam.geometry.screen_distance()};
  std::map<std::string, std::size_t> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(std::string(line), line_no, "expected 'key = value'");
    const std::string key(detail::trim(line.substr(0, eq)));
    const auto value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(key, line_no, "empty key");
    if (auto [it, fresh] = seen.emplace(key, line_no); !fresh)
      throw ConfigError(key, line_no, "duplicate key (first on line " + std::to_string(it->second) + ")");
    set_config_value(c, g, key, value, line_no);
  }
  if (!c.center_explicit) c.sensor.center_pixel = 0.5 * static_cast<double>(c.sensor.pixel_count);
  try {
    c.beam.geometry = SlitGeometry(g.width, g.wavelength, g.distance);
  } catch (const DomainError& e) {
    const std::string key = !(g.width > 0) ? "slit_width_m" : !(g.wavelength > 0) ? "wavelength_m" : "screen_distance_m";
    throw ConfigError(key, seen.count(key) ? seen[key] : 0, e.what());
  }
  try {
    c.validate();
  } catch (const DomainError& e) {
    throw ConfigError("(combined)", 0, e.what());
  }
  return c;
}

/// Writes every key, one per line, in the order of the table above.
inline std::string serialize_config(const RunConfig& c) {
  std::ostringstream o;
  const auto& s = c.sensor;
  const auto& b = c.beam;
  o << "# slitlab run configuration\n";
  o << "slit_width_m = " << format_double(b.geometry.slit_width()) << '\n';
  o << "wavelength_m = " << format_double(b.geometry.wavelength()) << '\n';
  o << "screen_distance_m = " << format_double(b.geometry.screen_distance()) << '\n';
  o << "slit_width_offset_m = " << format_double(b.slit_width_offset) << '\n';
  o << "screen_distance_offset_m = " << format_double(b.screen_distance_offset) << '\n';
  o << "pixel_count = " << s.pixel_count << '\n';
  o << "pixel_pitch_m = " << format_double(s.pixel_pitch) << '\n';
  o << "exposure_s = " << format_double(s.exposure) << '\n';
  if (c.center_explicit) o << "center_pixel = " << format_double(s.center_pixel) << '\n';
  o << "baseline_V = " << format_double(s.baseline_voltage) << '\n';
  o << "baseline_spread_V = " << format_double(s.baseline_spread) << '\n';
  o << "prnu_spread_V = " << format_double(s.prnu_spread) << '\n';
  o << "read_noise_V = " << format_double(s.read_noise_sigma) << '\n';
  o << "max_voltage_V = " << format_double(s.max_voltage) << '\n';
  o << "peak_scale_V = " << format_double(b.peak_scale) << '\n';
  o << "shot_noise_fraction = " << format_double(b.shot_noise_fraction) << '\n';
  o << "frames = " << c.frames << '\n';
  o << "seed = " << c.seed << '\n';
  o << "voltage_cap = " << c.voltage_cap << '\n';
  o << "guard_pixels = " << c.guard_pixels << '\n';
  o << "window_correction = " << (c.window_correction ? "true" : "false") << '\n';
  if (c.baseline_override) o << "baseline_override_V = " << format_double(*c.baseline_override) << '\n';
  return o.str();
}

inline RunConfig read_config(const std::filesystem::path& path) { return parse_config(io::detail::read_file(path)); }

}  // namespace slitlab
