#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "slitlab/analysis.hpp"

using namespace slitlab;

namespace {

const SlitGeometry kG = SlitGeometry::apparatus();

const FrameSet& noiseless_set() {
  static const FrameSet fs = [] {
    const auto [s, b] = noiseless(SensorModel{}, BeamModel{});
    return generate_frameset(s, b, 4, 42);
  }();
  return fs;
}

const FrameSet& noisy_set() {
  static const FrameSet fs = generate_frameset(SensorModel{}, BeamModel{}, 1500, 42);
  return fs;
}

std::vector<double> tail_for(const FrameSet& fs) {
  return pixel_template(fs.pixel_count(), fs.sensor().pixel_pitch, fs.sensor().center_pixel, fs.beam().geometry);
}

}  // namespace

TEST(Averaging, ConstantColumnsAreBitExact) {
  const auto s = SensorModel::with_pixels(16);
  std::vector<double> v(16 * 5, 0.1);
  const FrameSet fs(s, BeamModel{}, 0, 5, v);
  for (double x : average_frames(fs, 3)) EXPECT_EQ(x, 0.1);
}

TEST(Averaging, MatchesTheNaiveMeanAndIgnoresWorkerCount) {
  const auto& fs = noisy_set();
  const auto a1 = average_frames(fs, 1);
  const auto a8 = average_frames(fs, 8);
  EXPECT_EQ(a1, a8);
  for (std::size_t i : {0u, 700u, 1024u, 2047u}) {
    double sum = 0.0;
    for (std::size_t m = 0; m < fs.frame_count(); ++m) sum += fs.frame(m)[i];
    EXPECT_NEAR(a1[i], sum / fs.frame_count(), 1e-13);
  }
}

TEST(Baseline, NoiselessTailAwareEstimateIsUnbiased) {
  const auto& fs = noiseless_set();
  const auto avg = average_frames(fs);
  const auto est = estimate_baseline(avg, 64, tail_for(fs));
  EXPECT_FALSE(est.flat);
  EXPECT_NEAR(est.value, 1.4e-3, 0.02e-3);
  // The plain edge mean picks up the diffraction tail.
  EXPECT_GT(estimate_baseline(avg, 64).value, est.value);
}

TEST(Baseline, FlatInputIsReportedAsFlat) {
  const std::vector<double> v(256, 0.003);
  const auto est = estimate_baseline(v, 16);
  EXPECT_TRUE(est.flat);
  EXPECT_EQ(est.value, 0.003);
  const std::vector<double> tail(256, 0.0);
  EXPECT_TRUE(estimate_baseline(v, 16, tail).flat);
}

TEST(Baseline, RecoversAKnownDarkLevelUnderNoise) {
  SensorModel s;
  s.baseline_voltage = 2.0e-3;
  s.prnu_spread = 0.0;
  const auto fs = generate_frameset(s, BeamModel{}, 400, 9);
  const auto est = estimate_baseline(average_frames(fs), 64, tail_for(fs));
  EXPECT_NEAR(est.value, 2.0e-3, 0.05e-3);
}

TEST(Baseline, GuardBounds) {
  const std::vector<double> v(256, 0.0);
  EXPECT_THROW(estimate_baseline(v, 7), DomainError);
  EXPECT_THROW(estimate_baseline(v, 33), DomainError);
  EXPECT_NO_THROW(estimate_baseline(v, 32));
  EXPECT_THROW(estimate_baseline(v, 16, std::vector<double>(10, 0.0)), DomainError);
}

TEST(Histogram, FractionalPixels) {
  const std::vector<double> s{1.0, 2.0, 3.0};
  EXPECT_DOUBLE_EQ(detail::histogram_mass(s, -0.5, 2.5), 6.0);
  EXPECT_DOUBLE_EQ(detail::histogram_mass(s, 0.0, 1.0), 0.5 * 1.0 + 0.5 * 2.0);
  EXPECT_DOUBLE_EQ(detail::histogram_mass(s, 1.25, 1.75), 0.25 * 2.0 + 0.25 * 3.0);
  EXPECT_EQ(detail::histogram_mass(s, 2.0, 1.0), 0.0);
}

TEST(Normalization, UnitMassOverTheWindow) {
  const auto& fs = noiseless_set();
  const auto avg = average_frames(fs);
  const auto d = normalize_density(avg, 1.4e-3, kG, fs.sensor().pixel_pitch);
  EXPECT_NEAR(window_integral(d), 1.0, 1e-12);
  EXPECT_EQ(d.clamp_count, 0u);
  EXPECT_NEAR(d.center_pixel, 1024.0, 1e-9);
  EXPECT_NEAR(d.window_half_width, 1023.5, 1e-9);
  for (double x : d.density) EXPECT_GE(x, 0.0);
  EXPECT_NEAR(window_deficit(d), 0.0092094856952136844509, 1e-9);
}

TEST(Normalization, InvariantUnderSignalScaling) {
  const auto& fs = noiseless_set();
  const auto avg = average_frames(fs);
  std::vector<double> scaled(avg.size());
  for (std::size_t i = 0; i < avg.size(); ++i) scaled[i] = 1.4e-3 + 0.37 * (avg[i] - 1.4e-3);
  const auto a = normalize_density(avg, 1.4e-3, kG, 14e-6);
  const auto b = normalize_density(scaled, 1.4e-3, kG, 14e-6);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.density[i], b.density[i], 1e-9 * a.density[1024]);
}

TEST(Normalization, PeakScalingDoesNotConserveProbability) {
  const auto& fs = noiseless_set();
  const auto avg = average_frames(fs);
  const auto peak = peak_normalized_density(avg, 1.4e-3, kG);
  const double integral = std::accumulate(peak.begin(), peak.end(), 0.0) * 14e-6;
  EXPECT_GT(std::abs(integral - 1.0), 1e-3);
}

TEST(Normalization, RejectsImpossibleBaselines) {
  const auto avg = average_frames(noiseless_set());
  EXPECT_THROW(normalize_density(avg, 10.0, kG, 14e-6), DataError);
  EXPECT_THROW(normalize_density(avg, 1e-3, kG, 0.0), DomainError);
}

TEST(EmpiricalCurve, NoiselessMatchesTheClosedForm) {
  const auto res = analyze(noiseless_set());
  EXPECT_NEAR(res.curve.at(xi_from_screen(0.6558e-3, kG)), capture_probability(1.0), 5e-3);
  EXPECT_LT(res.report.max_abs_deviation, 5e-3);
  EXPECT_NEAR(res.raw_curve.samples().back().p, 1.0, 0.0);
  EXPECT_NEAR(res.curve.samples().back().p, 1.0 - res.report.window_deficit, 1e-15);
  EXPECT_NEAR(res.report.empirical_forbidden_fraction, 0.4397, 5e-3);
}

TEST(EmpiricalCurve, NoisyRunAtUnitXi) {
  const auto res = analyze(noisy_set());
  // Pixel 47 from the center sits closest to xi = 1.
  const auto& samples = res.curve.samples();
  const auto it = std::min_element(samples.begin(), samples.end(), [](const auto& a, const auto& b) {
    return std::abs(a.xi - 1.0) < std::abs(b.xi - 1.0);
  });
  EXPECT_NEAR(it->p, capture_probability(it->xi), 5e-3);
  EXPECT_NEAR(res.curve.at(1.0), 0.7737, 5e-3);
  for (std::size_t i = 1; i < samples.size(); ++i) EXPECT_GE(samples[i].p, samples[i - 1].p);
  EXPECT_NEAR(res.report.baseline_used, 1.4e-3, 0.05e-3);
  EXPECT_GT(res.report.baseline_sensitivity, 0.0);
}

TEST(EmpiricalCurve, WindowCorrectionArguments) {
  const ProbabilityCurve raw({{0.0, 0.0}, {1.0, 1.0}}, "raw");
  EXPECT_THROW(apply_window_correction(raw, -0.1), DomainError);
  EXPECT_THROW(apply_window_correction(raw, 1.0), DomainError);
  EXPECT_DOUBLE_EQ(apply_window_correction(raw, 0.25).samples().back().p, 0.75);
}

TEST(Comparison, IdenticalCurvesHaveZeroDeviation) {
  const auto c = analytic_curve(8.0, 801);
  const auto r = compare_curves(c);
  EXPECT_EQ(r.max_abs_deviation, 0.0);
  EXPECT_EQ(r.mean_abs_deviation, 0.0);
  ASSERT_EQ(r.deviation_by_band.size(), 4u);
  EXPECT_EQ(r.deviation_by_band[0].samples, 100u);
  EXPECT_EQ(r.deviation_by_band[1].samples, 100u);
  EXPECT_EQ(r.deviation_by_band[2].samples, 300u);
  EXPECT_EQ(r.deviation_by_band[3].samples, 301u);
  EXPECT_TRUE(std::isinf(r.deviation_by_band[3].xi_hi));
  EXPECT_NEAR(r.empirical_forbidden_fraction, r.analytic_forbidden_fraction, 1e-5);
  EXPECT_EQ(r.xi_coverage, 8.0);
}

TEST(Comparison, StepCurveAgainstTheClosedForm) {
  std::vector<CurveSample> s;
  for (int i = 0; i <= 300; ++i) s.push_back({i * 0.01, heisenberg_step(i * 0.01)});
  const ProbabilityCurve step(s, "step");
  const auto r = compare_curves(step);
  EXPECT_NEAR(r.max_abs_deviation, capture_probability(0.99), 1e-12);
  EXPECT_NEAR(sup_deviation(step, 0.99), capture_probability(0.99), 1e-12);
}

TEST(Comparison, RejectsCurvesThatDoNotStartAtZero) {
  EXPECT_THROW(compare_curves(ProbabilityCurve({{0.5, 0.1}}, "late")), DomainError);
  EXPECT_THROW(compare_curves(ProbabilityCurve({}, "empty")), DomainError);
}
