#pragma once

// Frame files.
//
// SLITFRM v1, binary, little-endian:
//   offset  size  field
//        0     8  magic "SLITFRM1"
//        8     4  u32 version (1)
//       12     4  u32 N (pixels per frame)
//       16     4  u32 M (frames)
//       20     8  f64 pixel pitch [m]
//       28     8  f64 exposure [s]
//       36     8  f64 max voltage [V]
//       44     8  f64 slit width [m]
//       52     8  f64 wavelength [m]
//       60     8  f64 screen distance [m]
//       68     8  u64 seed
//       76  8*M*N f64 voltages [V], frame-major
//
// CSV alternative: one header line
//   # SLITFRM-CSV v1, N=<n>, M=<m>, pixel_pitch_m=..., exposure_s=..., max_voltage_V=...,
//     slit_width_m=..., wavelength_m=..., screen_distance_m=..., seed=...
// followed by M lines of N comma-separated voltages.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "slitlab/ccd_sim.hpp"
#include "slitlab/errors.hpp"
#include "slitlab/format.hpp"

namespace slitlab::io {

inline constexpr std::string_view kFrameMagic = "SLITFRM1";
inline constexpr std::uint32_t kFrameVersion = 1;
inline constexpr std::size_t kFrameHeaderBytes = 76;
inline constexpr std::string_view kCsvTag = "# SLITFRM-CSV v1";

namespace detail {

template <class T>
void put_le(std::string& out, T value) {
  auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.append(bytes.data(), bytes.size());
}

class ByteReader {
 public:
  ByteReader(std::string_view data, std::size_t start) : data_(data), pos_(start) {}

  template <class T>
  T get(const char* field) {
    if (data_.size() - pos_ < sizeof(T))
      throw ParseError(std::string("truncated frame file while reading ") + field, data_.size());
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), data_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    pos_ += sizeof(T);
    return std::bit_cast<T>(bytes);
  }

  std::size_t pos() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path.string());
}

inline SensorModel sensor_from_header(std::uint32_t n, double pitch, double exposure, double vmax) {
  SensorModel s = SensorModel::with_pixels(n);
  s.pixel_pitch = pitch;
  s.exposure = exposure;
  s.max_voltage = vmax;
  return s;
}

}  // namespace detail

inline std::string encode_binary(const FrameSet& fs) {
  std::string out;
  out.reserve(kFrameHeaderBytes + fs.voltages().size() * sizeof(double));
  out.append(kFrameMagic);
  const auto& s = fs.sensor();
  const auto& g = fs.beam().geometry;
  detail::put_le<std::uint32_t>(out, kFrameVersion);
  detail::put_le<std::uint32_t>(out, fs.pixel_count());
  detail::put_le<std::uint32_t>(out, fs.frame_count());
  detail::put_le<double>(out, s.pixel_pitch);
  detail::put_le<double>(out, s.exposure);
  detail::put_le<double>(out, s.max_voltage);
  detail::put_le<double>(out, g.slit_width());
  detail::put_le<double>(out, g.wavelength());
  detail::put_le<double>(out, g.screen_distance());
  detail::put_le<std::uint64_t>(out, fs.seed());
  for (double v : fs.voltages()) detail::put_le<double>(out, v);
  return out;
}

/// Parses a SLITFRM v1 byte image. Sensor fields not stored in the file keep
/// their defaults; the center is N/2.
inline FrameSet decode_binary(std::string_view bytes) {
  if (bytes.size() < kFrameMagic.size()) throw ParseError("truncated frame file while reading magic", bytes.size());
  if (bytes.substr(0, kFrameMagic.size()) != kFrameMagic) throw ParseError("bad magic, expected SLITFRM1", 0);
  detail::ByteReader r(bytes, kFrameMagic.size());
  const auto at = [&r] { return r.pos(); };
  const std::size_t version_at = at();
  const auto version = r.get<std::uint32_t>("version");
  if (version != kFrameVersion) throw ParseError("unsupported SLITFRM version " + std::to_string(version), version_at);
  const std::size_t n_at = at();
  const auto n = r.get<std::uint32_t>("N");
  const std::size_t m_at = at();
  const auto m = r.get<std::uint32_t>("M");
  if (n < 2) throw ParseError("N must be >= 2", n_at);
  if (m < 1) throw ParseError("M must be >= 1", m_at);
  const double pitch = r.get<double>("pixel pitch");
  const double exposure = r.get<double>("exposure");
  const double vmax = r.get<double>("max voltage");
  const std::size_t geom_at = at();
  const double width = r.get<double>("slit width");
  const double wavelength = r.get<double>("wavelength");
  const double distance = r.get<double>("screen distance");
  const auto seed = r.get<std::uint64_t>("seed");

  const std::uint64_t count = static_cast<std::uint64_t>(n) * m;
  if (r.remaining() < count * sizeof(double))
    throw ParseError("truncated frame file: expected " + std::to_string(count * sizeof(double)) +
                         " voltage bytes, found " + std::to_string(r.remaining()),
                     bytes.size());
  if (r.remaining() > count * sizeof(double))
    throw ParseError("trailing bytes after " + std::to_string(count) + " voltages", at() + count * sizeof(double));

  std::vector<double> v(static_cast<std::size_t>(count));
  for (auto& x : v) {
    const std::size_t where = at();
    x = r.get<double>("voltage");
    if (!(x >= 0.0 && x <= vmax)) throw ParseError("voltage outside [0, max_voltage]", where);
  }

  BeamModel beam;
  try {
    beam.geometry = SlitGeometry(width, wavelength, distance);
  } catch (const DomainError& e) {
    throw ParseError(std::string("invalid geometry: ") + e.what(), geom_at);
  }
  SensorModel sensor = detail::sensor_from_header(n, pitch, exposure, vmax);
  if (!(pitch > 0.0 && exposure > 0.0 && vmax > 0.0)) throw ParseError("pitch, exposure and max voltage must be > 0", 20);
  return FrameSet(sensor, beam, seed, m, std::move(v));
}

inline std::string csv_header(const FrameSet& fs) {
  const auto& s = fs.sensor();
  const auto& g = fs.beam().geometry;
  std::string h(kCsvTag);
  h += ", N=" + std::to_string(fs.pixel_count());
  h += ", M=" + std::to_string(fs.frame_count());
  h += ", pixel_pitch_m=" + format_double(s.pixel_pitch);
  h += ", exposure_s=" + format_double(s.exposure);
  h += ", max_voltage_V=" + format_double(s.max_voltage);
  h += ", slit_width_m=" + format_double(g.slit_width());
  h += ", wavelength_m=" + format_double(g.wavelength());
  h += ", screen_distance_m=" + format_double(g.screen_distance());
  h += ", seed=" + std::to_string(fs.seed());
  return h;
}

inline std::string encode_csv(const FrameSet& fs) {
  std::string out = csv_header(fs);
  out += '\n';
  for (std::size_t m = 0; m < fs.frame_count(); ++m) {
    const auto f = fs.frame(m);
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (i > 0) out += ',';
      out += format_double(f[i]);
    }
    out += '\n';
  }
  return out;
}

inline FrameSet decode_csv(std::string_view text) {
  std::size_t pos = 0;
  const auto next_line = [&](std::size_t& start) -> std::string_view {
    start = pos;
    if (pos >= text.size()) return {};
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  };

  std::size_t start = 0;
  const auto header = next_line(start);
  if (header.substr(0, kCsvTag.size()) != kCsvTag) throw ParseError("missing '# SLITFRM-CSV v1' header", 0);
  std::map<std::string, std::string, std::less<>> kv;
  {
    std::string_view rest = header.substr(kCsvTag.size());
    while (!rest.empty()) {
      auto comma = rest.find(',');
      auto item = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) throw ParseError("malformed header item '" + std::string(item) + "'", 0);
      kv.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
    }
  }
  const auto num = [&](const char* key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParseError(std::string("header lacks ") + key, 0);
    auto v = parse_double(it->second);
    if (!v) throw ParseError(std::string("header value for ") + key + " is not a number", 0);
    return *v;
  };
  const auto integer = [&](const char* key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParseError(std::string("header lacks ") + key, 0);
    auto v = parse_u64(it->second);
    if (!v) throw ParseError(std::string("header value for ") + key + " is not an unsigned integer", 0);
    return *v;
  };
  const auto n = integer("N");
  const auto m = integer("M");
  if (n < 2 || n > 0xFFFFFFFFu || m < 1 || m > 0xFFFFFFFFu) throw ParseError("N or M out of range", 0);
  const double vmax = num("max_voltage_V");
  SensorModel sensor = detail::sensor_from_header(static_cast<std::uint32_t>(n), num("pixel_pitch_m"),
                                                  num("exposure_s"), vmax);
  BeamModel beam;
  try {
    beam.geometry = SlitGeometry(num("slit_width_m"), num("wavelength_m"), num("screen_distance_m"));
  } catch (const DomainError& e) {
    throw ParseError(std::string("invalid geometry: ") + e.what(), 0);
  }
  const auto seed = integer("seed");

  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(n * m));
  for (std::uint64_t row = 0; row < m; ++row) {
    const auto line = next_line(start);
    if (start >= text.size()) throw ParseError("truncated CSV: expected " + std::to_string(m) + " frame lines", start);
    std::size_t cpos = 0;
    std::uint64_t cols = 0;
    while (cpos <= line.size()) {
      auto comma = line.find(',', cpos);
      if (comma == std::string_view::npos) comma = line.size();
      const auto cell = line.substr(cpos, comma - cpos);
      const auto value = parse_double(cell);
      if (!value) throw ParseError("malformed voltage '" + std::string(cell) + "'", start + cpos);
      if (!(*value >= 0.0 && *value <= vmax)) throw ParseError("voltage outside [0, max_voltage]", start + cpos);
      v.push_back(*value);
      ++cols;
      cpos = comma + 1;
    }
    if (cols != n) throw ParseError("frame line has " + std::to_string(cols) + " values, expected " + std::to_string(n), start);
  }
  return FrameSet(sensor, beam, seed, static_cast<std::uint32_t>(m), std::move(v));
}

enum class FrameFormat { Binary, Csv };

inline void write_frames(const std::filesystem::path& path, const FrameSet& fs, FrameFormat format = FrameFormat::Binary) {
  detail::write_file(path, format == FrameFormat::Binary ? encode_binary(fs) : encode_csv(fs));
}

/// Reads either format, chosen by the leading bytes.
inline FrameSet read_frames(const std::filesystem::path& path) {
  const std::string bytes = detail::read_file(path);
  if (std::string_view(bytes).substr(0, kCsvTag.size()) == kCsvTag) return decode_csv(bytes);
  return decode_binary(bytes);
}

}  // namespace slitlab::io
