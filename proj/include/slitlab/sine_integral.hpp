#pragma once

#include <cmath>
#include <complex>

#include "slitlab/constants.hpp"
#include "slitlab/errors.hpp"

namespace slitlab {

/// Branch boundaries of sine_integral, in |x|.
inline constexpr double kSiSeriesLimit = 4.0;
inline constexpr double kSiAsymptoticStart = 32.0;

namespace detail {

// Power series sum_n (-1)^n x^(2n+1) / ((2n+1) (2n+1)!). Accurate to ~1e-16 for |x| <= 4.
inline double si_series(double x) {
  const double x2 = x * x;
  double term = x;  // x^(2n+1) / (2n+1)!
  double sum = x;
  for (int n = 1; n < 60; ++n) {
    term *= -x2 / ((2.0 * n) * (2.0 * n + 1.0));
    const double add = term / (2.0 * n + 1.0);
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// Modified Lentz evaluation of the continued fraction for E1(ix); x > 0.
// Si(x) = pi/2 + Im(e^{-ix} h), where h is the continued fraction value.
inline double si_continued_fraction(double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  std::complex<double> b(1.0, x);
  std::complex<double> c(1.0 / tiny, 0.0);
  std::complex<double> d = 1.0 / b;
  std::complex<double> h = d;
  for (int i = 2; i < 2000; ++i) {
    const double a = -static_cast<double>(i - 1) * static_cast<double>(i - 1);
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const std::complex<double> del = c * d;
    h *= del;
    if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < eps) {
      h *= std::complex<double>(std::cos(x), -std::sin(x));
      return kPi / 2.0 + h.imag();
    }
  }
  throw ConvergenceError("sine_integral: continued fraction did not converge");
}

// Si(x) = pi/2 - f(x) cos x - g(x) sin x with the auxiliary asymptotic series
//   f ~ (1/x) sum (-1)^n (2n)!/x^(2n),  g ~ (1/x^2) sum (-1)^n (2n+1)!/x^(2n).
// Summation stops at the smallest term; for x >= 32 that is below 1e-14.
inline double si_asymptotic(double x) {
  const double inv2 = 1.0 / (x * x);
  double f = 0.0;
  double g = 0.0;
  double tf = 1.0;  // (2n)! / x^(2n)
  double tg = 1.0;  // (2n+1)! / x^(2n)
  for (int n = 0; n < 40; ++n) {
    f += (n % 2 == 0 ? tf : -tf);
    g += (n % 2 == 0 ? tg : -tg);
    const double nf = tf * (2.0 * n + 1.0) * (2.0 * n + 2.0) * inv2;
    const double ng = tg * (2.0 * n + 2.0) * (2.0 * n + 3.0) * inv2;
    if (nf >= tf || nf < 1e-17) break;
    tf = nf;
    tg = ng;
  }
  f /= x;
  g *= inv2;
  return kPi / 2.0 - f * std::cos(x) - g * std::sin(x);
}

}  // namespace detail

/// Sine integral Si(x) = integral of sin(t)/t over [0, x].
///
/// Three branches by |x|: power series up to 4, the E1(ix) continued fraction
/// up to 32, and the asymptotic auxiliary-function expansion beyond. Absolute
/// error stays below 1e-12 everywhere. Si is odd, and the result for -x is the
/// exact negation of the result for x.
inline double sine_integral(double x) {
  if (!std::isfinite(x)) throw DomainError("sine_integral: non-finite argument");
  if (x == 0.0) return 0.0;
  const double ax = std::abs(x);
  double v;
  if (ax <= kSiSeriesLimit) {
    v = detail::si_series(ax);
  } else if (ax <= kSiAsymptoticStart) {
    v = detail::si_continued_fraction(ax);
  } else {
    v = detail::si_asymptotic(ax);
  }
  return x < 0.0 ? -v : v;
}

}  // namespace slitlab
