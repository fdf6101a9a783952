#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "slitlab/analytic.hpp"

using namespace slitlab;

namespace {

const SlitGeometry kG = SlitGeometry::apparatus();
const double kB = kG.slit_width();
const double kUnit = kPlanck / kB;  // momentum spacing of density zeros

// Golden-section maximization, used as an oracle independent of the Newton solve.
double golden_max(double (*f)(double), double lo, double hi) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - r * (hi - lo);
  double d = lo + r * (hi - lo);
  while (hi - lo > 1e-13) {
    if (f(c) > f(d)) hi = d;
    else lo = c;
    c = hi - r * (hi - lo);
    d = lo + r * (hi - lo);
  }
  return 0.5 * (lo + hi);
}

double sinc2_of_pi_u(double u) { return sinc_squared(kPi * u); }

}  // namespace

TEST(Geometry, RejectsNonPositiveParameters) {
  EXPECT_THROW(SlitGeometry(0.0, 1e-6, 1.0), DomainError);
  EXPECT_THROW(SlitGeometry(1e-4, -1e-6, 1.0), DomainError);
  EXPECT_THROW(SlitGeometry(1e-4, 1e-6, std::numeric_limits<double>::quiet_NaN()), DomainError);
  EXPECT_THROW(DimensionlessProduct(-0.1), DomainError);
}

TEST(Geometry, ApparatusDerivedQuantities) {
  EXPECT_NEAR(kG.fresnel_number(), 0.094543146193734499775, 1e-15);
  EXPECT_LT(kG.fresnel_number(), 0.1);
  EXPECT_NEAR(kG.first_minimum(), 1.3115704838709677419e-3, 1e-15);
  EXPECT_NEAR(kG.first_minimum() / 14e-6, 93.683605990783410138, 1e-9);
  EXPECT_DOUBLE_EQ(kG.incident_momentum(), kPlanck / 632.82e-9);
}

TEST(Geometry, DimensionlessProductRoundTrip) {
  const auto xi = DimensionlessProduct::from_momentum_interval(3.0 * kUnit, kB);
  EXPECT_NEAR(xi.value(), 3.0, 1e-15);
  EXPECT_NEAR(xi.momentum_width(kB) / kUnit, 3.0, 1e-15);
  EXPECT_EQ(capture_probability(xi), capture_probability(xi.value()));
}

TEST(MomentumDensity, PeakAndFirstZero) {
  EXPECT_DOUBLE_EQ(momentum_density(0.0, kB), kB / kPlanck);
  EXPECT_LT(momentum_density(kUnit, kB), 1e-30 * kB / kPlanck);
}

TEST(MomentumDensity, IsEven) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> dist(0.0, 50.0);
  for (int i = 0; i < 500; ++i) {
    const double p = dist(gen) * kUnit;
    EXPECT_EQ(momentum_density(p, kB), momentum_density(-p, kB));
  }
}

TEST(MomentumDensity, NormalizationOverTwoHundredLobes) {
  // Density in units of 1/kUnit integrated over |u| <= 200, one panel per lobe.
  std::vector<double> pts;
  for (int n = 0; n <= 200; ++n) pts.push_back(n);
  const auto f = [](double u) { return sinc_squared(kPi * u); };
  const double mass = 2.0 * quad::integrate(f, pts, {1e-13, 50});
  EXPECT_GE(mass, 0.9968);
  EXPECT_LE(mass, 1.0);
  // The tail beyond 200 lobes is bounded by 2 / (pi^2 200).
  EXPECT_NEAR(mass, 1.0, 2.0 / (kPi * kPi * 200.0));
}

TEST(MomentumDensity, ScreenIntensityIsTheSameLawInScreenCoordinates) {
  // I(x) dx = rho(p) dp with p = h x / (lambda L).
  const double dpdx = kPlanck / (kG.wavelength() * kG.screen_distance());
  for (double u = 0.013; u < 30.0; u *= 1.31) {
    const double x = u * kG.first_minimum();
    const double lhs = screen_intensity(x, kG);
    const double rhs = momentum_density(dpdx * x, kB) * dpdx;
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(lhs, rhs)) << "u = " << u;
  }
  EXPECT_DOUBLE_EQ(screen_intensity(0.0, kG), kB / (kG.wavelength() * kG.screen_distance()));
  EXPECT_LT(screen_intensity(kG.first_minimum(), kG), 1e-30 * screen_intensity(0.0, kG));
}

TEST(Wavefunction, NormalizedAndTransformsToTheMomentumDensity) {
  EXPECT_DOUBLE_EQ(slit_wavefunction(0.0, kB), 1.0 / std::sqrt(kB));
  EXPECT_EQ(slit_wavefunction(0.51 * kB, kB), 0.0);
  const double norm =
      quad::integrate([](double x) { return std::pow(slit_wavefunction(x, kB), 2); }, -0.5 * kB, 0.5 * kB);
  EXPECT_NEAR(norm, 1.0, 1e-12);

  for (double u : {0.0, 0.25, 0.5, 1.3, 2.5, 3.7}) {
    const double p = u * kUnit;
    const auto re = [p](double x) { return slit_wavefunction(x, kB) * std::cos(2.0 * kPi * p * x / kPlanck); };
    const double amp = quad::integrate(re, -0.5 * kB, 0.5 * kB, {1e-15, 50});
    const double rho = amp * amp / kPlanck;
    EXPECT_NEAR(rho / (kB / kPlanck), momentum_density(p, kB) / (kB / kPlanck), 1e-6) << "u = " << u;
  }
}

TEST(Wavefunction, WideSupportFormIsNotNormalized) {
  const double norm = quad::integrate([](double x) { return std::pow(slit_wavefunction_wide(x, kB), 2); }, -kB, kB);
  EXPECT_NEAR(norm, 2.0, 1e-12);
}

// Reference values: tests/oracles/compute_oracles.py.
TEST(CaptureProbability, FrozenReferenceValues) {
  EXPECT_EQ(capture_probability(0.0), 0.0);
  EXPECT_NEAR(capture_probability(0.5), 0.46736956489125162999, 1e-13);
  EXPECT_NEAR(capture_probability(1.0), 0.77369500990281618446, 1e-13);
  EXPECT_NEAR(capture_probability(2.0), 0.9028233335802806268, 1e-13);
  EXPECT_NEAR(capture_probability(10.0), 0.97977634230775731917, 1e-13);
  EXPECT_NEAR(capture_probability(0.89), 0.72412830693935374536, 1e-13);
  EXPECT_NEAR(capture_probability(1.0), 0.774, 1e-3);
  EXPECT_NEAR(capture_probability(2.0), 0.903, 1e-3);
  EXPECT_NEAR(capture_probability(10.0), 0.980, 1e-3);
}

TEST(CaptureProbability, EvenIntegersReduceToTheSineIntegral) {
  for (int n = 2; n <= 20; n += 2)
    EXPECT_NEAR(capture_probability(n), 2.0 / kPi * sine_integral(kPi * n), 1e-15) << "xi = " << n;
}

TEST(CaptureProbability, SmallArgumentLimit) {
  const double xi = 1e-4;
  EXPECT_NEAR(capture_probability(xi) / xi, 1.0, 1e-4);
  EXPECT_NEAR(capture_probability(xi), 9.9999999725844322733e-5, 1e-15);
}

TEST(CaptureProbability, ApproachesOne) {
  EXPECT_GE(capture_probability(1e3), 0.999);
  EXPECT_LE(capture_probability(1e3), 1.0);
}

TEST(CaptureProbability, DerivativeIdentity) {
  // Fourth-order central differences at 50 points, skipping even integers
  // where the slope vanishes.
  for (int i = 0; i < 50; ++i) {
    const double xi = 0.05 + 0.1973 * i;
    const double h = 1e-3;
    const double d = (-capture_probability(xi + 2 * h) + 8 * capture_probability(xi + h) - 8 * capture_probability(xi - h) +
                      capture_probability(xi - 2 * h)) /
                     (12 * h);
    const double s = capture_probability_slope(xi);
    const double expected = 4.0 / (kPi * kPi) * std::pow(std::sin(0.5 * kPi * xi), 2) / (xi * xi);
    EXPECT_NEAR(s, expected, 1e-14);
    EXPECT_NEAR(d, s, 1e-9) << "xi = " << xi;
  }
  EXPECT_EQ(capture_probability_slope(0.0), 1.0);
}

TEST(CaptureProbability, MonotoneAndBounded) {
  double prev = 0.0;
  for (int i = 1; i <= 20000; ++i) {
    const double p = capture_probability(i * 1e-3);
    EXPECT_GE(p, prev);
    EXPECT_LE(p, 1.0);
    prev = p;
  }
}

TEST(CaptureProbability, RejectsInvalidArguments) {
  EXPECT_THROW(capture_probability(-1e-9), DomainError);
  EXPECT_THROW(capture_probability(std::numeric_limits<double>::quiet_NaN()), DomainError);
  EXPECT_THROW(capture_probability(std::numeric_limits<double>::infinity()), DomainError);
  EXPECT_THROW(capture_probability_slope(-1.0), DomainError);
}

TEST(CaptureProbability, ClosedFormMatchesQuadrature) {
  for (int i = 0; i < 100; ++i) {
    const double xi = 1e-3 * std::pow(5e4, i / 99.0);
    EXPECT_NEAR(capture_probability(xi), capture_probability_quadrature(xi, 1e-10), 1e-8) << "xi = " << xi;
  }
}

TEST(CaptureProbability, QuadratureIsIndependentOfSlitWidth) {
  for (double b : {1e-6, 124e-6, 1e-2})
    EXPECT_NEAR(capture_probability_quadrature(3.3, 1e-10, b), capture_probability(3.3), 1e-8) << "b = " << b;
}

TEST(CaptureProbability, QuadratureArgumentChecks) {
  EXPECT_EQ(capture_probability_quadrature(0.0, 1e-8), 0.0);
  EXPECT_THROW(capture_probability_quadrature(-1.0, 1e-8), DomainError);
  EXPECT_THROW(capture_probability_quadrature(1.0, 0.0), DomainError);
  EXPECT_THROW(capture_probability_quadrature(1.0, 0.1), DomainError);
  EXPECT_THROW(capture_probability_quadrature(1.0, 1e-8, -1.0), DomainError);
}

TEST(HeisenbergStep, IsRightContinuousAtOne) {
  EXPECT_EQ(heisenberg_step(0.0), 0.0);
  EXPECT_EQ(heisenberg_step(std::nextafter(1.0, 0.0)), 0.0);
  EXPECT_EQ(heisenberg_step(1.0), 1.0);
  EXPECT_EQ(heisenberg_step(7.0), 1.0);
}

TEST(ScreenMap, ReferencePoints) {
  EXPECT_EQ(xi_from_screen(0.0, kG), 0.0);
  EXPECT_NEAR(xi_from_screen(0.6558e-3, kG), 1.0000225044169529831, 1e-14);
  EXPECT_NEAR(xi_from_screen(0.6558e-3, kG), 1.0, 1e-3);
  EXPECT_NEAR(xi_from_screen(14e-6, kG), 0.021348452366327145111, 1e-16);
  EXPECT_EQ(xi_from_screen(kG.first_minimum(), kG), 2.0);
  EXPECT_EQ(xi_from_screen(-1e-3, kG), xi_from_screen(1e-3, kG));
}

TEST(ScreenMap, RoundTripWithinOneUlp) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> dist(0.0, 0.05);
  for (int i = 0; i < 10000; ++i) {
    const double x = dist(gen);
    const double back = screen_from_xi(xi_from_screen(x, kG), kG);
    EXPECT_LE(std::abs(back - x), 2.0 * std::abs(std::nextafter(x, 1.0) - x)) << "x = " << x;
  }
  EXPECT_THROW(screen_from_xi(-1.0, kG), DomainError);
}

TEST(ForbiddenFraction, AnalyticValue) {
  EXPECT_NEAR(forbidden_fraction_analytic(), 0.43968412725333962958, 1e-12);
  EXPECT_NEAR(forbidden_fraction_analytic(), 0.44, 2e-3);
}

TEST(ForbiddenFraction, SampledCurves) {
  const ProbabilityCurve step({{0.0, 0.0}, {std::nextafter(1.0, 0.0), 0.0}, {1.0, 1.0}, {2.0, 1.0}}, "step");
  EXPECT_NEAR(forbidden_fraction(step), 0.0, 1e-15);
  const ProbabilityCurve one({{0.0, 1.0}, {3.0, 1.0}}, "one");
  EXPECT_DOUBLE_EQ(forbidden_fraction(one), 1.0);
  EXPECT_NEAR(forbidden_fraction(analytic_curve(5.0, 5001)), forbidden_fraction_analytic(), 1e-6);
  const ProbabilityCurve short_curve({{0.0, 0.0}, {0.5, 0.4}}, "short");
  EXPECT_THROW(forbidden_fraction(short_curve), DomainError);
}

TEST(ProbabilityCurveType, ValidatesAndInterpolates) {
  EXPECT_THROW(ProbabilityCurve({{0.0, 0.0}, {0.0, 0.1}}, "dup"), DomainError);
  EXPECT_THROW(ProbabilityCurve({{0.0, 0.5}, {1.0, 0.4}}, "down"), DomainError);
  EXPECT_THROW(ProbabilityCurve({{0.0, 1.2}}, "big"), DomainError);
  EXPECT_NO_THROW(ProbabilityCurve({{0.0, 0.5}, {1.0, 0.499}}, "tol", 0.01));
  const ProbabilityCurve c({{0.0, 0.0}, {2.0, 1.0}}, "line");
  EXPECT_DOUBLE_EQ(c.at(0.5), 0.25);
  EXPECT_THROW(c.at(2.5), DomainError);
}

TEST(Landmarks, HalfMaximumWidth) {
  const double x = half_maximum_half_width(kG);
  EXPECT_NEAR(screen_intensity(x, kG), 0.5 * screen_intensity(0.0, kG), 1e-9 * screen_intensity(0.0, kG));
  EXPECT_NEAR(xi_from_screen(x, kG), 0.88589294137890468062, 1e-10);
  EXPECT_NEAR(xi_from_screen(x, kG), 0.89, 1e-2);
}

TEST(Landmarks, FirstSideLobe) {
  const auto lobe = first_side_lobe();
  const double u = golden_max(&sinc2_of_pi_u, 1.0, 2.0);
  EXPECT_NEAR(lobe.argument_over_pi, u, 1e-7);
  EXPECT_NEAR(lobe.argument_over_pi, 1.4302966531242027578, 1e-13);
  EXPECT_NEAR(lobe.peak_ratio, 21.190728556426629975, 1e-10);
  EXPECT_NEAR(lobe.peak_ratio, 21.19, 5e-3);
}

TEST(Moments, SmallCutoffTaylorLimit) {
  const double k = 0.01 * kUnit;
  const double expected = kB / kPlanck * 2.0 * k * k * k / 3.0;
  EXPECT_NEAR(truncated_second_moment(k, kB) / expected, 1.0, 1e-3);
}

TEST(Moments, GrowsLinearlyWithTheCutoff) {
  const double m100 = truncated_second_moment(100.0 * kUnit, kB);
  const double m200 = truncated_second_moment(200.0 * kUnit, kB);
  EXPECT_GE(m200 / m100, 1.8);
  EXPECT_LE(m200 / m100, 2.2);
  EXPECT_NEAR(m100 / (kUnit * kUnit), 10.132118364233777144, 1e-8 * 10.13);
  EXPECT_NEAR(m200 / (kUnit * kUnit), 20.264236728467554289, 1e-8 * 20.26);
}

TEST(Moments, CutoffExceedingAnyBound) {
  for (double bound : {1.0, 50.0, 400.0}) {
    const double b = bound * kUnit * kUnit;
    const double k = moment_cutoff_exceeding(b, kB);
    EXPECT_GT(truncated_second_moment(k, kB), b);
    EXPECT_LE(truncated_second_moment(k * (1 - 1e-6), kB), b * (1 + 1e-9));
  }
  EXPECT_THROW(moment_cutoff_exceeding(-1.0, kB), DomainError);
}
