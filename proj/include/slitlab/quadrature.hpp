#pragma once

// Numerical integration used across the toolkit: adaptive Simpson for smooth
// integrands with known breakpoints, fixed-panel composite rules, and an
// 8-point Gauss-Legendre rule for pixel apertures.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "slitlab/errors.hpp"

namespace slitlab::quad {

struct AdaptiveOptions {
  double abs_tol = 1e-10;
  int max_depth = 40;
};

struct AdaptiveResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;
};

namespace detail {

template <class F>
double adaptive_step(const F& f, double a, double b, double fa, double fm, double fb, double whole,
                     double tol, int depth, AdaptiveResult& acc) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  acc.evaluations += 2;
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) {
    acc.error_estimate += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  // An interval that can no longer be split in floating point is accepted as-is.
  if (depth <= 0 || !(a < lm && lm < m && m < rm && rm < b)) {
    acc.converged = false;
    acc.error_estimate += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, acc) +
         adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, acc);
}

}  // namespace detail

/// Adaptive Simpson with Richardson correction over [a, b].
///
/// The tolerance is split evenly across halves at each level. When max_depth
/// is exhausted on some subinterval the result is still returned, with
/// `converged` cleared; callers that need a guarantee use `integrate`.
template <class F>
AdaptiveResult adaptive_simpson(const F& f, double a, double b, AdaptiveOptions opt = {}) {
  AdaptiveResult acc;
  if (a == b) return acc;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  acc.evaluations = 3;
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  acc.value = detail::adaptive_step(f, a, b, fa, fm, fb, whole, opt.abs_tol, opt.max_depth, acc);
  return acc;
}

/// Adaptive Simpson over consecutive breakpoints. The tolerance is shared in
/// proportion to segment length. Throws ConvergenceError on failure.
template <class F>
double integrate(const F& f, std::span<const double> breakpoints, AdaptiveOptions opt = {}) {
  if (breakpoints.size() < 2) return 0.0;
  const double span = breakpoints.back() - breakpoints.front();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    AdaptiveOptions seg = opt;
    if (span != 0.0) seg.abs_tol = opt.abs_tol * std::abs((b - a) / span);
    const auto r = adaptive_simpson(f, a, b, seg);
    if (!r.converged) {
      throw ConvergenceError("adaptive Simpson did not reach tolerance " + std::to_string(seg.abs_tol) +
                             " on [" + std::to_string(a) + ", " + std::to_string(b) + "] within depth " +
                             std::to_string(opt.max_depth));
    }
    total += r.value;
  }
  return total;
}

template <class F>
double integrate(const F& f, double a, double b, AdaptiveOptions opt = {}) {
  const std::array<double, 2> pts{a, b};
  return integrate(f, std::span<const double>(pts), opt);
}

/// Composite Simpson with an even number of uniform panels.
template <class F>
double composite_simpson(const F& f, double a, double b, std::size_t panels) {
  if (panels < 2 || panels % 2 != 0) throw DomainError("composite Simpson needs an even panel count >= 2");
  const double h = (b - a) / static_cast<double>(panels);
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t i = 1; i < panels; ++i) {
    const double x = a + h * static_cast<double>(i);
    (i % 2 == 1 ? odd : even) += f(x);
  }
  return h / 3.0 * (f(a) + 4.0 * odd + 2.0 * even + f(b));
}

/// Trapezoid rule over sampled, increasing abscissae.
inline double trapezoid(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DomainError("trapezoid: abscissa/ordinate length mismatch");
  double sum = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) sum += 0.5 * (xs[i] - xs[i - 1]) * (ys[i] + ys[i - 1]);
  return sum;
}

/// 8-point Gauss-Legendre nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> kGL8Nodes{
    -0.9602898564975362316835609, -0.7966664774136267395915539, -0.5255324099163289858177390,
    -0.1834346424956498049394761, 0.1834346424956498049394761,  0.5255324099163289858177390,
    0.7966664774136267395915539,  0.9602898564975362316835609};
inline constexpr std::array<double, 8> kGL8Weights{
    0.1012285362903762591525314, 0.2223810344533744705443560, 0.3137066458778872873379622,
    0.3626837833783619829651504, 0.3626837833783619829651504, 0.3137066458778872873379622,
    0.2223810344533744705443560, 0.1012285362903762591525314};

template <class F>
double gauss_legendre8(const F& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < kGL8Nodes.size(); ++i) sum += kGL8Weights[i] * f(mid + half * kGL8Nodes[i]);
  return half * sum;
}

}  // namespace slitlab::quad
