#pragma once

// Closed-form single-slit physics: slit wavefunction, momentum and screen
// densities, the capture probability law P(xi) and its quadrature twin, the
// xi <-> screen map, and the forbidden-region statistic.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "slitlab/constants.hpp"
#include "slitlab/errors.hpp"
#include "slitlab/geometry.hpp"
#include "slitlab/probability_curve.hpp"
#include "slitlab/quadrature.hpp"
#include "slitlab/sine_integral.hpp"

namespace slitlab {

/// (sin a / a)^2 with the removable point a = 0 returning 1.
inline double sinc_squared(double a) {
  if (a == 0.0) return 1.0;
  const double s = std::sin(a) / a;
  return s * s;
}

/// Amplitude of the slit state: 1/sqrt(b) on |x| <= b/2, zero elsewhere.
///
/// The support is the full slit width b (half-width b/2), which makes the
/// state unit-normalized and its Fourier transform reproduce momentum_density
/// exactly. `slit_wavefunction_wide` keeps the wider |x| <= b support with the
/// same amplitude; its norm is 2.
inline double slit_wavefunction(double x, double slit_width) {
  if (!(slit_width > 0.0)) throw DomainError("slit_wavefunction: slit width must be > 0");
  return std::abs(x) <= 0.5 * slit_width ? 1.0 / std::sqrt(slit_width) : 0.0;
}

inline double slit_wavefunction_wide(double x, double slit_width) {
  if (!(slit_width > 0.0)) throw DomainError("slit_wavefunction_wide: slit width must be > 0");
  return std::abs(x) <= slit_width ? 1.0 / std::sqrt(slit_width) : 0.0;
}

/// Transverse momentum density after the slit, (dx/h) sinc^2(pi dx p / h).
inline double momentum_density(double p, double slit_width) {
  if (!(slit_width > 0.0)) throw DomainError("momentum_density: slit width must be > 0");
  return slit_width / kPlanck * sinc_squared(kPi * slit_width * p / kPlanck);
}

/// Far-field intensity per unit screen length, (b / (lambda L)) sinc^2(pi b x / (lambda L)).
/// Integrates to 1 over the whole screen.
inline double screen_intensity(double x, const SlitGeometry& g) {
  const double k = g.slit_width() / (g.wavelength() * g.screen_distance());
  return k * sinc_squared(kPi * k * x);
}

/// Integral of screen_intensity over a pixel aperture of width `pitch`
/// centered at `center_x`, by 8-point Gauss-Legendre.
inline double pixel_aperture_intensity(double center_x, double pitch, const SlitGeometry& g) {
  return quad::gauss_legendre8([&g](double x) { return screen_intensity(x, g); }, center_x - 0.5 * pitch,
                               center_x + 0.5 * pitch);
}

/// xi for a symmetric screen interval of half-width |x|: xi = 2 b |x| / (lambda L).
inline double xi_from_screen(double x, const SlitGeometry& g) {
  return 2.0 * g.slit_width() * std::abs(x) / (g.wavelength() * g.screen_distance());
}

/// Inverse of xi_from_screen on x >= 0.
inline double screen_from_xi(double xi, const SlitGeometry& g) {
  if (!std::isfinite(xi) || xi < 0.0) throw DomainError("screen_from_xi: xi must be finite and >= 0");
  return xi * g.wavelength() * g.screen_distance() / (2.0 * g.slit_width());
}

/// Probability that the transverse momentum lies in the symmetric interval
/// |p| <= dp/2, as a function of xi = dp dx / h:
///   P(xi) = (2/pi) [ Si(pi xi) - (2/pi) sin^2(pi xi / 2) / xi ].
inline double capture_probability(double xi) {
  if (!std::isfinite(xi) || xi < 0.0) throw DomainError("capture_probability: xi must be finite and >= 0");
  if (xi == 0.0) return 0.0;
  const double s = std::sin(0.5 * kPi * xi);
  return 2.0 / kPi * (sine_integral(kPi * xi) - 2.0 / kPi * s * s / xi);
}

inline double capture_probability(DimensionlessProduct xi) { return capture_probability(xi.value()); }

/// dP/dxi = (4/pi^2) sin^2(pi xi / 2) / xi^2, with the limit 1 at xi = 0.
inline double capture_probability_slope(double xi) {
  if (!std::isfinite(xi) || xi < 0.0) throw DomainError("capture_probability_slope: xi must be finite and >= 0");
  return sinc_squared(0.5 * kPi * xi);
}

/// P(xi) by adaptive quadrature of momentum_density over |p| <= dp/2 in
/// physical units, with breakpoints at the density zeros. Relative tolerance
/// must lie in (1e-14, 1e-2).
inline double capture_probability_quadrature(double xi, double rel_tol,
                                             double slit_width = SlitGeometry::apparatus().slit_width()) {
  if (!std::isfinite(xi) || xi < 0.0) throw DomainError("capture_probability_quadrature: xi must be finite and >= 0");
  if (!(rel_tol > 1e-14 && rel_tol < 1e-2)) throw DomainError("capture_probability_quadrature: rel_tol outside (1e-14, 1e-2)");
  if (!(slit_width > 0.0)) throw DomainError("capture_probability_quadrature: slit width must be > 0");
  if (xi == 0.0) return 0.0;

  const double unit = kPlanck / slit_width;  // momentum spacing of density zeros
  const double half = 0.5 * xi * unit;
  std::vector<double> pts{-half};
  const auto zeros = static_cast<long>(std::floor(0.5 * xi));
  for (long n = -zeros; n <= zeros; ++n) {
    const double z = static_cast<double>(n) * unit;
    if (z > -half && z < half) pts.push_back(z);
  }
  pts.push_back(half);
  if (pts.size() == 2 || zeros == 0) {
    // Split at the peak so the first Simpson pass sees the central maximum.
    pts = {-half, 0.0, half};
  }

  const auto f = [slit_width](double p) { return momentum_density(p, slit_width); };
  double coarse = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) coarse += quad::composite_simpson(f, pts[i], pts[i + 1], 16);
  quad::AdaptiveOptions opt;
  opt.abs_tol = rel_tol * std::abs(coarse);
  return quad::integrate(f, std::span<const double>(pts), opt);
}

/// Heisenberg step: 0 for xi < 1, 1 for xi >= 1 (right-continuous).
inline double heisenberg_step(double xi) { return xi >= 1.0 ? 1.0 : 0.0; }

/// Number of uniform Simpson panels used for the analytic forbidden fraction.
inline constexpr std::size_t kForbiddenFractionPanels = std::size_t{1} << 14;

/// Mean of the closed-form P over [0, xi_max] by composite Simpson.
inline double forbidden_fraction_analytic(double xi_max = 1.0) {
  if (!(std::isfinite(xi_max) && xi_max > 0.0)) throw DomainError("forbidden_fraction: xi_max must be > 0");
  return quad::composite_simpson([](double xi) { return capture_probability(xi); }, 0.0, xi_max,
                                 kForbiddenFractionPanels) /
         xi_max;
}

/// Mean of a sampled curve over [0, xi_max] by the trapezoid rule; the
/// endpoint xi_max is linearly interpolated when it falls between samples.
inline double forbidden_fraction(const ProbabilityCurve& curve, double xi_max = 1.0) {
  if (!(std::isfinite(xi_max) && xi_max > 0.0)) throw DomainError("forbidden_fraction: xi_max must be > 0");
  if (!curve.covers(0.0, xi_max)) throw DomainError("forbidden_fraction: curve does not cover [0, xi_max]");
  std::vector<double> xs;
  std::vector<double> ps;
  for (const auto& s : curve.samples()) {
    if (s.xi >= xi_max) break;
    xs.push_back(s.xi);
    ps.push_back(s.p);
  }
  xs.push_back(xi_max);
  ps.push_back(curve.at(xi_max));
  return quad::trapezoid(xs, ps) / xi_max;
}

/// Samples the closed form on a uniform grid of `samples` points over [0, xi_max].
inline ProbabilityCurve analytic_curve(double xi_max, std::size_t samples) {
  if (!(xi_max > 0.0) || samples < 2) throw DomainError("analytic_curve: need xi_max > 0 and >= 2 samples");
  std::vector<CurveSample> out;
  out.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double xi = xi_max * static_cast<double>(i) / static_cast<double>(samples - 1);
    out.push_back({xi, capture_probability(xi)});
  }
  return ProbabilityCurve(std::move(out), "analytic");
}

/// Mass of the screen intensity on [lo, hi] (lo <= 0 <= hi), via the closed form.
inline double screen_window_mass(double lo, double hi, const SlitGeometry& g) {
  if (!(lo <= 0.0 && hi >= 0.0)) throw DomainError("screen_window_mass: window must contain the optical axis");
  return 0.5 * (capture_probability(xi_from_screen(2.0 * lo, g)) + capture_probability(xi_from_screen(2.0 * hi, g)));
}

/// Half-width at half maximum of the screen intensity, by bisection on the
/// central lobe.
inline double half_maximum_half_width(const SlitGeometry& g) {
  const double peak = screen_intensity(0.0, g);
  double lo = 0.0;
  double hi = g.first_minimum();
  for (int i = 0; i < 200 && hi - lo > 1e-15 * g.first_minimum(); ++i) {
    const double mid = 0.5 * (lo + hi);
    (screen_intensity(mid, g) > 0.5 * peak ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct SideLobe {
  double argument_over_pi = 0.0;  // position of the first secondary maximum of sinc^2(pi u), in u
  double peak_ratio = 0.0;        // central maximum / first secondary maximum
};

/// First secondary maximum of sinc^2, from the stationarity condition tan a = a
/// solved by Newton iteration on a cos a - sin a in (pi, 3 pi / 2).
inline SideLobe first_side_lobe() {
  double a = 1.43 * kPi;
  for (int i = 0; i < 50; ++i) {
    const double f = a * std::cos(a) - std::sin(a);
    const double df = -a * std::sin(a);
    const double step = f / df;
    a -= step;
    if (std::abs(step) < 1e-15 * a) break;
  }
  return {a / kPi, 1.0 / sinc_squared(a)};
}

/// Second moment of the momentum density truncated to |p| <= cutoff:
/// the integral of p^2 momentum_density(p) over [-cutoff, cutoff].
/// Grows linearly in the cutoff, so the untruncated variance does not exist.
inline double truncated_second_moment(double cutoff, double slit_width, double rel_tol = 1e-10) {
  if (!(std::isfinite(cutoff) && cutoff > 0.0)) throw DomainError("truncated_second_moment: cutoff must be > 0");
  if (!(slit_width > 0.0)) throw DomainError("truncated_second_moment: slit width must be > 0");
  const double unit = kPlanck / slit_width;
  std::vector<double> pts{0.0};
  for (double n = 1.0; n * unit < cutoff; n += 1.0) pts.push_back(n * unit);
  pts.push_back(cutoff);
  const auto f = [slit_width](double p) { return p * p * momentum_density(p, slit_width); };
  double coarse = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) coarse += quad::composite_simpson(f, pts[i], pts[i + 1], 16);
  quad::AdaptiveOptions opt;
  opt.abs_tol = rel_tol * std::abs(coarse);
  return 2.0 * quad::integrate(f, std::span<const double>(pts), opt);
}

/// Smallest cutoff (to bisection precision) at which the truncated second
/// moment exceeds `bound`: doubling bracket, then bisection.
inline double moment_cutoff_exceeding(double bound, double slit_width) {
  if (!(std::isfinite(bound) && bound > 0.0)) throw DomainError("moment_cutoff_exceeding: bound must be > 0");
  double hi = kPlanck / slit_width;
  double lo = 0.0;
  int doublings = 0;
  while (truncated_second_moment(hi, slit_width) <= bound) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 60) throw ConvergenceError("moment_cutoff_exceeding: bound not reached");
  }
  for (int i = 0; i < 60 && hi - lo > 1e-9 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (truncated_second_moment(mid, slit_width) > bound ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace slitlab
