#pragma once

// Evaluation of measured (or simulated) frames: frame averaging, in-situ
// baseline, total-voltage normalization, cumulative capture probability on
// symmetric screen intervals, and comparison against the closed form.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iterator>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slitlab/analytic.hpp"
#include "slitlab/ccd_sim.hpp"
#include "slitlab/errors.hpp"
#include "slitlab/geometry.hpp"
#include "slitlab/parallel.hpp"
#include "slitlab/probability_curve.hpp"

namespace slitlab {

/// Per-pixel mean over all frames.
///
/// Each pixel is accumulated in frame order as (frame 0) + compensated sum of
/// deviations from frame 0, so constant columns come back bit-exact. Work is
/// split across pixels, never across frames, which keeps the result identical
/// for any worker count.
inline std::vector<double> average_frames(const FrameSet& frames, unsigned workers = worker_count()) {
  const std::size_t n = frames.pixel_count();
  const std::size_t m = frames.frame_count();
  if (m == 0) throw DomainError("average_frames: empty frame set");
  const auto data = frames.voltages();
  std::vector<double> mean(n);
  parallel_for(n, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double ref = data[i];
      double sum = 0.0;
      double comp = 0.0;  // Neumaier compensation
      for (std::size_t f = 1; f < m; ++f) {
        const double d = data[f * n + i] - ref;
        const double t = sum + d;
        comp += std::abs(sum) >= std::abs(d) ? (sum - t) + d : (d - t) + sum;
        sum = t;
      }
      mean[i] = ref + (sum + comp) / static_cast<double>(m);
    }
  });
  return mean;
}

struct BaselineEstimate {
  double value = 0.0;
  bool flat = false;  // input carried no variation at all
};

namespace detail {

inline void check_guard(std::size_t n, std::size_t guard) {
  if (guard < 8 || guard > n / 8)
    throw DomainError("estimate_baseline: guard_pixels must lie in [8, N/8], got " + std::to_string(guard));
}

inline bool all_equal(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

}  // namespace detail

/// Plain dark estimate: mean of the `guard` outermost pixels at each sensor edge.
/// Biased upward by whatever diffraction tail reaches the edges.
inline BaselineEstimate estimate_baseline(std::span<const double> averaged, std::size_t guard) {
  detail::check_guard(averaged.size(), guard);
  if (detail::all_equal(averaged)) return {averaged.front(), true};
  double sum = 0.0;
  for (std::size_t k = 0; k < guard; ++k) sum += averaged[k] + averaged[averaged.size() - 1 - k];
  return {sum / static_cast<double>(2 * guard), false};
}

/// Relative pixel response to the diffraction pattern, t_i = box_i / box_center,
/// for a pattern centered at `center_pixel`.
inline std::vector<double> pixel_template(std::size_t pixel_count, double pitch, double center_pixel,
                                          const SlitGeometry& g) {
  const double ref = pixel_aperture_intensity(0.0, pitch, g);
  std::vector<double> t(pixel_count);
  for (std::size_t i = 0; i < pixel_count; ++i)
    t[i] = pixel_aperture_intensity((static_cast<double>(i) - center_pixel) * pitch, pitch, g) / ref;
  return t;
}

/// Tail-aware dark estimate: least-squares fit U_i = c + a t_i over the guard
/// pixels at both edges, returning the intercept c. `tail` is the expected
/// relative response (see pixel_template).
inline BaselineEstimate estimate_baseline(std::span<const double> averaged, std::size_t guard,
                                          std::span<const double> tail) {
  detail::check_guard(averaged.size(), guard);
  if (tail.size() != averaged.size()) throw DomainError("estimate_baseline: template length mismatch");
  if (detail::all_equal(averaged)) return {averaged.front(), true};
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < guard; ++k) {
    idx.push_back(k);
    idx.push_back(averaged.size() - 1 - k);
  }
  double mt = 0.0, mu = 0.0;
  for (auto i : idx) {
    mt += tail[i];
    mu += averaged[i];
  }
  mt /= static_cast<double>(idx.size());
  mu /= static_cast<double>(idx.size());
  double stt = 0.0, stu = 0.0;
  for (auto i : idx) {
    stt += (tail[i] - mt) * (tail[i] - mt);
    stu += (tail[i] - mt) * (averaged[i] - mu);
  }
  if (!(stt > 0.0)) return {mu, false};
  return {mu - (stu / stt) * mt, false};
}

/// Baseline-subtracted intensity normalized to unit mass over the analysis
/// window: the largest screen interval symmetric about the refined pattern
/// center that the sensor covers (boundary pixels count fractionally).
struct EmpiricalDensity {
  std::vector<double> positions;  // x_i = (i - center) * pitch [m]
  std::vector<double> density;    // per meter
  double baseline_used = 0.0;     // V
  double total_voltage = 0.0;     // V, above-baseline signal summed over the window
  double pixel_pitch = 0.0;       // m
  double center_pixel = 0.0;      // refined, fractional pixel index
  double window_half_width = 0.0; // pixels
  std::size_t clamp_count = 0;    // pixels below baseline, clamped to zero
  SlitGeometry geometry = SlitGeometry::apparatus();

  std::size_t size() const noexcept { return density.size(); }
};

namespace detail {

// Mass of a piecewise-constant pixel histogram on [lo, hi] (pixel coordinates;
// pixel i spans [i - 1/2, i + 1/2]).
inline double histogram_mass(std::span<const double> s, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  const auto n = static_cast<long>(s.size());
  long first = std::max(0L, static_cast<long>(std::floor(lo + 0.5)));
  long last = std::min(n - 1, static_cast<long>(std::floor(hi + 0.5)));
  double m = 0.0;
  for (long i = first; i <= last; ++i) {
    const double a = std::max(lo, static_cast<double>(i) - 0.5);
    const double b = std::min(hi, static_cast<double>(i) + 0.5);
    if (b > a) m += s[static_cast<std::size_t>(i)] * (b - a);
  }
  return m;
}

// Signal centroid over the central lobe around the brightest pixel.
inline double lobe_centroid(std::span<const double> s, double lobe_pixels) {
  const auto peak = static_cast<long>(std::max_element(s.begin(), s.end()) - s.begin());
  const auto half = std::max(1L, static_cast<long>(std::floor(lobe_pixels)));
  const long lo = std::max(0L, peak - half);
  const long hi = std::min(static_cast<long>(s.size()) - 1, peak + half);
  double w = 0.0, wx = 0.0;
  for (long i = lo; i <= hi; ++i) {
    w += s[static_cast<std::size_t>(i)];
    wx += s[static_cast<std::size_t>(i)] * static_cast<double>(i - peak);
  }
  return static_cast<double>(peak) + (w > 0.0 ? wx / w : 0.0);
}

}  // namespace detail

struct NormalizeOptions {
  bool refine_center = true;
  std::optional<double> center_pixel;  // defaults to N/2 when not refining
};

/// density_i = max(U_i - baseline, 0) / (W pitch), W the clamped signal mass
/// inside the analysis window. Never normalizes by the peak value.
inline EmpiricalDensity normalize_density(std::span<const double> averaged, double baseline, const SlitGeometry& g,
                                          double pitch, NormalizeOptions opt = {}) {
  if (averaged.size() < 2) throw DomainError("normalize_density: need at least two pixels");
  if (!(pitch > 0.0)) throw DomainError("normalize_density: pitch must be > 0");
  if (!(baseline < *std::max_element(averaged.begin(), averaged.end())))
    throw DataError("normalize_density: baseline is not below the maximum voltage");

  EmpiricalDensity d;
  d.geometry = g;
  d.pixel_pitch = pitch;
  d.baseline_used = baseline;
  std::vector<double> s(averaged.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double v = averaged[i] - baseline;
    if (v < 0.0) ++d.clamp_count;
    s[i] = std::max(v, 0.0);
  }

  const double n = static_cast<double>(s.size());
  if (opt.refine_center) {
    d.center_pixel = detail::lobe_centroid(s, g.first_minimum() / pitch);
  } else {
    d.center_pixel = opt.center_pixel.value_or(0.5 * n);
  }
  d.window_half_width = std::min(d.center_pixel + 0.5, n - 0.5 - d.center_pixel);
  if (!(d.window_half_width > 0.0)) throw DataError("normalize_density: pattern center lies outside the sensor");

  d.total_voltage = detail::histogram_mass(s, d.center_pixel - d.window_half_width, d.center_pixel + d.window_half_width);
  if (!(d.total_voltage > 0.0)) throw DataError("normalize_density: no signal above baseline");

  d.positions.resize(s.size());
  d.density.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    d.positions[i] = (static_cast<double>(i) - d.center_pixel) * pitch;
    d.density[i] = s[i] / (d.total_voltage * pitch);
  }
  return d;
}

/// Box integral of the density over the analysis window (1 by construction).
inline double window_integral(const EmpiricalDensity& d) {
  return detail::histogram_mass(d.density, d.center_pixel - d.window_half_width, d.center_pixel + d.window_half_width) *
         d.pixel_pitch;
}

/// The naive alternative: scale so the brightest pixel matches the analytic
/// peak density. Its integral over the window is (W / s_max) pitch I(0),
/// which is not 1 in general.
inline std::vector<double> peak_normalized_density(std::span<const double> averaged, double baseline,
                                                   const SlitGeometry& g) {
  std::vector<double> s(averaged.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::max(averaged[i] - baseline, 0.0);
  const double peak = *std::max_element(s.begin(), s.end());
  if (!(peak > 0.0)) throw DataError("peak_normalized_density: no signal above baseline");
  const double i0 = screen_intensity(0.0, g);
  for (auto& v : s) v = v / peak * i0;
  return s;
}

/// Probability mass the closed form puts outside the analysis window.
inline double window_deficit(const EmpiricalDensity& d) {
  return 1.0 - capture_probability(xi_from_screen(d.window_half_width * d.pixel_pitch, d.geometry));
}

/// Raw empirical P on symmetric intervals |x - center| <= k pitch,
/// k = 0, 1, ..., plus the window edge. Normalized over the window, so the last
/// sample is 1. Masses are accumulated outward in nonnegative slices; any
/// decrease beyond 1e-9 is a data error, smaller ones are rounding and removed.
inline ProbabilityCurve empirical_probability(const EmpiricalDensity& d) {
  if (d.density.empty()) throw DomainError("empirical_probability: empty density");
  const double norm = window_integral(d);
  if (!(std::abs(norm - 1.0) <= 1e-9)) throw DomainError("empirical_probability: density is not normalized");

  const double c = d.center_pixel;
  const double hmax = d.window_half_width;
  std::vector<double> halfwidths;
  for (double k = 0.0; k <= hmax; k += 1.0) halfwidths.push_back(k);
  if (hmax - halfwidths.back() > 1e-9) halfwidths.push_back(hmax);

  std::vector<CurveSample> out;
  out.reserve(halfwidths.size());
  double mass = 0.0;
  double prev_h = 0.0;
  for (double h : halfwidths) {
    const double slice = detail::histogram_mass(d.density, c + prev_h, c + h) +
                         detail::histogram_mass(d.density, c - h, c - prev_h);
    const double next = mass + slice * d.pixel_pitch;
    if (next < mass - 1e-9) throw DataError("empirical_probability: monotonicity violated");
    mass = std::max(mass, next);
    prev_h = h;
    out.push_back({xi_from_screen(h * d.pixel_pitch, d.geometry), std::min(mass, 1.0)});
  }
  out.back().p = 1.0;  // the whole window, exactly
  return ProbabilityCurve(std::move(out), "empirical-window", 1e-9);
}

/// Rescales a window-normalized curve by (1 - deficit), the fraction of the
/// total mass the window holds according to the closed form.
inline ProbabilityCurve apply_window_correction(const ProbabilityCurve& raw, double deficit) {
  if (!(deficit >= 0.0 && deficit < 1.0)) throw DomainError("apply_window_correction: deficit outside [0, 1)");
  std::vector<CurveSample> out = raw.samples();
  for (auto& s : out) s.p *= (1.0 - deficit);
  return ProbabilityCurve(std::move(out), "empirical", 1e-9);
}

struct BandStats {
  double xi_lo = 0.0;
  double xi_hi = 0.0;  // +inf for the open band
  double max_abs_deviation = 0.0;
  double mean_abs_deviation = 0.0;
  std::size_t samples = 0;
};

struct ComparisonReport {
  std::string label;
  double max_abs_deviation = 0.0;
  double mean_abs_deviation = 0.0;
  std::vector<BandStats> deviation_by_band;
  double empirical_forbidden_fraction = 0.0;
  double analytic_forbidden_fraction = 0.0;
  std::size_t clamp_count = 0;
  double xi_coverage = 0.0;
  // Context carried alongside the comparison.
  double window_deficit = 0.0;
  double baseline_used = 0.0;
  double baseline_sensitivity = 0.0;  // max |change| of the forbidden fraction for baseline +- spread
  double center_pixel = 0.0;
};

inline constexpr double kBandEdges[] = {0.0, 1.0, 2.0, 5.0};

using AnalyticSampler = std::function<double(double)>;

/// Deviations |P_emp - P_analytic| at the empirical sample points, overall and
/// per xi band [0,1), [1,2), [2,5), [5,inf), plus both forbidden fractions.
inline ComparisonReport compare_curves(const ProbabilityCurve& empirical,
                                       const AnalyticSampler& analytic = [](double xi) { return capture_probability(xi); }) {
  if (empirical.empty()) throw DomainError("compare_curves: empirical curve is empty");
  if (empirical.xi_min() > 0.0) throw DomainError("compare_curves: empirical curve does not start at xi = 0");
  ComparisonReport r;
  r.label = empirical.label();
  const std::size_t nb = std::size(kBandEdges);
  r.deviation_by_band.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    r.deviation_by_band[b].xi_lo = kBandEdges[b];
    r.deviation_by_band[b].xi_hi = b + 1 < nb ? kBandEdges[b + 1] : std::numeric_limits<double>::infinity();
  }
  double sum = 0.0;
  for (const auto& s : empirical.samples()) {
    const double dev = std::abs(s.p - analytic(s.xi));
    r.max_abs_deviation = std::max(r.max_abs_deviation, dev);
    sum += dev;
    auto& band = r.deviation_by_band[static_cast<std::size_t>(
        std::upper_bound(std::begin(kBandEdges), std::end(kBandEdges), s.xi) - std::begin(kBandEdges) - 1)];
    band.max_abs_deviation = std::max(band.max_abs_deviation, dev);
    band.mean_abs_deviation += dev;
    ++band.samples;
  }
  r.mean_abs_deviation = sum / static_cast<double>(empirical.size());
  for (auto& b : r.deviation_by_band)
    if (b.samples > 0) b.mean_abs_deviation /= static_cast<double>(b.samples);
  r.xi_coverage = empirical.xi_max();
  r.analytic_forbidden_fraction = forbidden_fraction_analytic(1.0);
  r.empirical_forbidden_fraction = empirical.covers(0.0, 1.0) ? forbidden_fraction(empirical, 1.0) : 0.0;
  return r;
}

/// Largest |P_emp - P_analytic| over samples with xi <= xi_limit.
inline double sup_deviation(const ProbabilityCurve& empirical, double xi_limit,
                            const AnalyticSampler& analytic = [](double xi) { return capture_probability(xi); }) {
  double m = 0.0;
  for (const auto& s : empirical.samples())
    if (s.xi <= xi_limit) m = std::max(m, std::abs(s.p - analytic(s.xi)));
  return m;
}

struct AnalysisOptions {
  std::size_t guard_pixels = 64;
  std::optional<double> baseline_override;  // external dark level, skips estimation
  bool window_correction = true;
  double baseline_spread = 0.4e-3;  // perturbation for the sensitivity figure
  unsigned workers = 0;             // 0: SLITLAB_THREADS / hardware
};

struct AnalysisResult {
  std::vector<double> averaged;
  BaselineEstimate baseline;
  EmpiricalDensity density;
  ProbabilityCurve raw_curve{{}, "empirical-window"};
  ProbabilityCurve curve{{}, "empirical"};
  ComparisonReport report;
};

namespace detail {

inline ProbabilityCurve curve_for_baseline(std::span<const double> averaged, double baseline, const FrameSet& frames,
                                           bool correct, EmpiricalDensity* density_out = nullptr,
                                           ProbabilityCurve* raw_out = nullptr) {
  auto density = normalize_density(averaged, baseline, frames.beam().geometry, frames.sensor().pixel_pitch);
  auto raw = empirical_probability(density);
  auto curve = correct ? apply_window_correction(raw, window_deficit(density))
                       : ProbabilityCurve(raw.samples(), "empirical", 1e-9);
  if (density_out) *density_out = std::move(density);
  if (raw_out) *raw_out = std::move(raw);
  return curve;
}

}  // namespace detail

/// Full evaluation of a frame set against the closed form.
inline AnalysisResult analyze(const FrameSet& frames, const AnalysisOptions& opt = {}) {
  AnalysisResult res;
  res.averaged = average_frames(frames, opt.workers == 0 ? worker_count() : opt.workers);
  const auto& sensor = frames.sensor();
  const auto& g = frames.beam().geometry;
  if (opt.baseline_override) {
    res.baseline = {*opt.baseline_override, false};
  } else {
    const auto tail = pixel_template(sensor.pixel_count, sensor.pixel_pitch, sensor.center_pixel, g);
    res.baseline = estimate_baseline(res.averaged, opt.guard_pixels, tail);
  }
  res.curve = detail::curve_for_baseline(res.averaged, res.baseline.value, frames, opt.window_correction, &res.density,
                                         &res.raw_curve);
  res.report = compare_curves(res.curve);
  res.report.clamp_count = res.density.clamp_count;
  res.report.window_deficit = window_deficit(res.density);
  res.report.baseline_used = res.baseline.value;
  res.report.center_pixel = res.density.center_pixel;

  double sensitivity = 0.0;
  for (double sign : {-1.0, 1.0}) {
    const double b = res.baseline.value + sign * opt.baseline_spread;
    try {
      const auto c = detail::curve_for_baseline(res.averaged, b, frames, opt.window_correction);
      if (c.covers(0.0, 1.0))
        sensitivity = std::max(sensitivity, std::abs(forbidden_fraction(c, 1.0) - res.report.empirical_forbidden_fraction));
    } catch (const DataError&) {
      // A perturbed baseline above the signal leaves nothing to normalize; the
      // sensitivity figure then covers only the side that worked.
    }
  }
  res.report.baseline_sensitivity = sensitivity;
  return res;
}

}  // namespace slitlab
