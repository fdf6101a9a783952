#pragma once

// Synthetic CCD line sensor. Renders the far-field intensity into per-pixel
// voltages and adds a fixed per-pixel offset pattern (PRNU), photon shot noise
// and read noise. Every random draw is keyed by (seed, frame, pixel).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slitlab/analytic.hpp"
#include "slitlab/errors.hpp"
#include "slitlab/geometry.hpp"
#include "slitlab/parallel.hpp"
#include "slitlab/philox.hpp"
#include "slitlab/quadrature.hpp"

namespace slitlab {

/// Line-sensor electronics. Voltages in volts, lengths in meters.
struct SensorModel {
  std::uint32_t pixel_count = 2048;
  double pixel_pitch = 14e-6;
  double exposure = 1.25e-3;
  double baseline_voltage = 1.4e-3;
  double baseline_spread = 0.4e-3;
  double prnu_spread = 0.4e-3;
  double max_voltage = 4.5;
  double read_noise_sigma = 0.2e-3;
  double center_pixel = 1024.0;

  /// Default sensor with the center at N/2.
  static SensorModel with_pixels(std::uint32_t n) {
    SensorModel s;
    s.pixel_count = n;
    s.center_pixel = 0.5 * static_cast<double>(n);
    return s;
  }

  /// Screen coordinate of pixel i's center, (i - center) * pitch.
  double position(std::size_t i) const { return (static_cast<double>(i) - center_pixel) * pixel_pitch; }

  void validate() const {
    if (pixel_count < 2) throw DomainError("SensorModel: pixel_count must be >= 2");
    if (!(pixel_pitch > 0.0 && std::isfinite(pixel_pitch))) throw DomainError("SensorModel: pixel_pitch must be > 0");
    if (!(exposure > 0.0 && std::isfinite(exposure))) throw DomainError("SensorModel: exposure must be > 0");
    if (!(max_voltage > 0.0 && std::isfinite(max_voltage))) throw DomainError("SensorModel: max_voltage must be > 0");
    if (!(baseline_voltage >= 0.0)) throw DomainError("SensorModel: baseline_voltage must be >= 0");
    if (!(baseline_spread >= 0.0 && prnu_spread >= 0.0 && read_noise_sigma >= 0.0))
      throw DomainError("SensorModel: spreads and noise must be >= 0");
    if (!(baseline_voltage + baseline_spread + prnu_spread < max_voltage))
      throw DomainError("SensorModel: baseline plus spreads must stay below max_voltage");
    if (!std::isfinite(center_pixel)) throw DomainError("SensorModel: center_pixel must be finite");
  }

  friend bool operator==(const SensorModel&, const SensorModel&) = default;
};

/// Illumination: the slit geometry, the signal level at the central pixel and
/// the shot-noise level. The offsets perturb the geometry used for rendering
/// (systematic-error studies); the nominal geometry is what gets recorded.
struct BeamModel {
  SlitGeometry geometry = SlitGeometry::apparatus();
  double peak_scale = 4.0;
  double shot_noise_fraction = 0.01;  // shot sigma at the peak, as a fraction of peak_scale
  double slit_width_offset = 0.0;
  double screen_distance_offset = 0.0;

  SlitGeometry rendered_geometry() const {
    return {geometry.slit_width() + slit_width_offset, geometry.wavelength(),
            geometry.screen_distance() + screen_distance_offset};
  }

  void validate(const SensorModel& sensor) const {
    if (!(peak_scale > 0.0 && peak_scale <= sensor.max_voltage - sensor.baseline_voltage))
      throw DomainError("BeamModel: peak_scale must lie in (0, max_voltage - baseline_voltage]");
    if (!(shot_noise_fraction >= 0.0 && std::isfinite(shot_noise_fraction)))
      throw DomainError("BeamModel: shot_noise_fraction must be >= 0");
    (void)rendered_geometry();  // throws if the offsets make the geometry invalid
  }

  friend bool operator==(const BeamModel&, const BeamModel&) = default;
};

/// Same models with PRNU, read and shot noise switched off.
inline std::pair<SensorModel, BeamModel> noiseless(SensorModel sensor, BeamModel beam) {
  sensor.prnu_spread = 0.0;
  sensor.read_noise_sigma = 0.0;
  beam.shot_noise_fraction = 0.0;
  return {sensor, beam};
}

/// Noise-free voltage of every pixel: baseline plus peak_scale times the
/// pixel-box integral of the intensity relative to the box at x = 0.
inline std::vector<double> expected_voltages(const SensorModel& sensor, const BeamModel& beam) {
  sensor.validate();
  beam.validate(sensor);
  const SlitGeometry g = beam.rendered_geometry();
  const double ref = pixel_aperture_intensity(0.0, sensor.pixel_pitch, g);
  std::vector<double> v(sensor.pixel_count);
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = sensor.baseline_voltage + beam.peak_scale * (pixel_aperture_intensity(sensor.position(i), sensor.pixel_pitch, g) / ref);
  return v;
}

inline double expected_pixel_voltage(std::int64_t pixel_index, const SensorModel& sensor, const BeamModel& beam) {
  sensor.validate();
  beam.validate(sensor);
  if (pixel_index < 0 || pixel_index >= static_cast<std::int64_t>(sensor.pixel_count))
    throw DomainError("expected_pixel_voltage: pixel index " + std::to_string(pixel_index) + " out of range");
  const SlitGeometry g = beam.rendered_geometry();
  const double ref = pixel_aperture_intensity(0.0, sensor.pixel_pitch, g);
  return sensor.baseline_voltage +
         beam.peak_scale * (pixel_aperture_intensity(sensor.position(static_cast<std::size_t>(pixel_index)), sensor.pixel_pitch, g) / ref);
}

/// Counter stream ids.
inline constexpr std::uint32_t kStreamPrnu = 0;
inline constexpr std::uint32_t kStreamFrame = 1;

/// Fixed per-pixel offset, uniform on [-prnu_spread, +prnu_spread]; depends on (seed, pixel) only.
inline double prnu_offset(std::uint64_t seed, std::uint32_t pixel, double spread) {
  if (spread == 0.0) return 0.0;
  const auto block = rng::philox4x32({pixel, 0u, 0u, kStreamPrnu}, rng::key_from_seed(seed));
  return spread * (2.0 * rng::uniform_open(block[0], block[1]) - 1.0);
}

/// Renders frames for one (sensor, beam, seed) triple. Holds only values
/// derived from its inputs, so `frame` is safe to call concurrently.
class FrameGenerator {
 public:
  FrameGenerator(SensorModel sensor, BeamModel beam, std::uint64_t seed)
      : sensor_(sensor), beam_(std::move(beam)), seed_(seed), expected_(expected_voltages(sensor_, beam_)) {
    prnu_.resize(sensor_.pixel_count);
    shot_sigma_.resize(sensor_.pixel_count);
    const double peak_sigma = beam_.shot_noise_fraction * beam_.peak_scale;
    for (std::uint32_t i = 0; i < sensor_.pixel_count; ++i) {
      prnu_[i] = prnu_offset(seed_, i, sensor_.prnu_spread);
      const double signal = std::max(expected_[i] - sensor_.baseline_voltage, 0.0);
      shot_sigma_[i] = peak_sigma * std::sqrt(signal / beam_.peak_scale);
    }
  }

  const SensorModel& sensor() const noexcept { return sensor_; }
  const BeamModel& beam() const noexcept { return beam_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::span<const double> expected() const noexcept { return expected_; }
  std::span<const double> prnu() const noexcept { return prnu_; }

  void frame_into(std::uint64_t frame_index, std::span<double> out) const {
    if (out.size() != sensor_.pixel_count) throw DomainError("frame_into: output length must equal pixel_count");
    const auto key = rng::key_from_seed(seed_);
    const auto lo = static_cast<std::uint32_t>(frame_index);
    const auto hi = static_cast<std::uint32_t>(frame_index >> 32);
    for (std::uint32_t i = 0; i < sensor_.pixel_count; ++i) {
      double v = expected_[i] + prnu_[i];
      if (shot_sigma_[i] > 0.0 || sensor_.read_noise_sigma > 0.0) {
        const auto z = rng::normal_pair(rng::philox4x32({i, lo, hi, kStreamFrame}, key));
        v += shot_sigma_[i] * z[0] + sensor_.read_noise_sigma * z[1];
      }
      out[i] = std::clamp(v, 0.0, sensor_.max_voltage);
    }
  }

  std::vector<double> frame(std::uint64_t frame_index) const {
    std::vector<double> out(sensor_.pixel_count);
    frame_into(frame_index, out);
    return out;
  }

 private:
  SensorModel sensor_;
  BeamModel beam_;
  std::uint64_t seed_;
  std::vector<double> expected_;
  std::vector<double> prnu_;
  std::vector<double> shot_sigma_;
};

inline std::vector<double> generate_frame(std::uint64_t frame_index, const SensorModel& sensor, const BeamModel& beam,
                                          std::uint64_t seed) {
  return FrameGenerator(sensor, beam, seed).frame(frame_index);
}

/// M frames of N voltages, frame-major. Immutable once built.
class FrameSet {
 public:
  FrameSet(SensorModel sensor, BeamModel beam, std::uint64_t seed, std::uint32_t frame_count, std::vector<double> voltages)
      : sensor_(sensor), beam_(std::move(beam)), seed_(seed), frame_count_(frame_count), voltages_(std::move(voltages)) {
    if (frame_count_ < 1) throw DomainError("FrameSet: frame_count must be >= 1");
    if (voltages_.size() != static_cast<std::size_t>(frame_count_) * sensor_.pixel_count)
      throw DomainError("FrameSet: voltage count is not frame_count x pixel_count");
    for (double v : voltages_)
      if (!(v >= 0.0 && v <= sensor_.max_voltage)) throw DataError("FrameSet: voltage outside [0, max_voltage]");
  }

  const SensorModel& sensor() const noexcept { return sensor_; }
  const BeamModel& beam() const noexcept { return beam_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint32_t frame_count() const noexcept { return frame_count_; }
  std::uint32_t pixel_count() const noexcept { return sensor_.pixel_count; }
  std::span<const double> voltages() const noexcept { return voltages_; }

  std::span<const double> frame(std::size_t m) const {
    if (m >= frame_count_) throw DomainError("FrameSet::frame: index out of range");
    return std::span<const double>(voltages_).subspan(m * sensor_.pixel_count, sensor_.pixel_count);
  }

 private:
  SensorModel sensor_;
  BeamModel beam_;
  std::uint64_t seed_;
  std::uint32_t frame_count_;
  std::vector<double> voltages_;
};

/// Default cap on M * N stored voltages (2^27 doubles, 1 GiB).
inline constexpr std::uint64_t kDefaultVoltageCap = std::uint64_t{1} << 27;

inline FrameSet generate_frameset(const SensorModel& sensor, const BeamModel& beam, std::uint32_t frame_count,
                                  std::uint64_t seed, std::uint64_t voltage_cap = kDefaultVoltageCap,
                                  unsigned workers = worker_count()) {
  if (frame_count < 1) throw DomainError("generate_frameset: frame count must be >= 1");
  const std::uint64_t total = static_cast<std::uint64_t>(frame_count) * sensor.pixel_count;
  if (total > voltage_cap)
    throw CapacityError("generate_frameset: " + std::to_string(total) + " voltages exceed the cap of " +
                        std::to_string(voltage_cap));
  const FrameGenerator gen(sensor, beam, seed);
  std::vector<double> data(static_cast<std::size_t>(total));
  parallel_for(frame_count, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t m = begin; m < end; ++m)
      gen.frame_into(m, std::span<double>(data).subspan(m * sensor.pixel_count, sensor.pixel_count));
  });
  return FrameSet(sensor, beam, seed, frame_count, std::move(data));
}

}  // namespace slitlab
