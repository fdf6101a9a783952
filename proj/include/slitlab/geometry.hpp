#pragma once

#include <cmath>
#include <string>

#include "slitlab/constants.hpp"
#include "slitlab/errors.hpp"

namespace slitlab {

/// Slit apparatus: slit width b (taken as the position uncertainty), source
/// wavelength and slit-to-screen distance, all in meters.
class SlitGeometry {
 public:
  SlitGeometry(double slit_width, double wavelength, double screen_distance)
      : slit_width_(slit_width), wavelength_(wavelength), screen_distance_(screen_distance) {
    check("slit_width", slit_width_);
    check("wavelength", wavelength_);
    check("screen_distance", screen_distance_);
  }

  /// b = 124 um, 632.82 nm HeNe line, L = 257 mm.
  static SlitGeometry apparatus() { return {124e-6, 632.82e-9, 0.257}; }

  double slit_width() const noexcept { return slit_width_; }
  double wavelength() const noexcept { return wavelength_; }
  double screen_distance() const noexcept { return screen_distance_; }

  /// Incident momentum p0 = h / wavelength.
  double incident_momentum() const noexcept { return kPlanck / wavelength_; }

  /// b^2 / (wavelength L). The far-field description assumes this is small;
  /// it is reported, not enforced.
  double fresnel_number() const noexcept { return slit_width_ * slit_width_ / (wavelength_ * screen_distance_); }

  /// Screen position of the first interference minimum, wavelength L / b.
  double first_minimum() const noexcept { return wavelength_ * screen_distance_ / slit_width_; }

  friend bool operator==(const SlitGeometry&, const SlitGeometry&) = default;

 private:
  static void check(const char* name, double v) {
    if (!(std::isfinite(v) && v > 0.0)) throw DomainError(std::string("SlitGeometry: ") + name + " must be finite and > 0");
  }

  double slit_width_;
  double wavelength_;
  double screen_distance_;
};

/// The precision product xi = dp dx / h. Non-negative and finite.
class DimensionlessProduct {
 public:
  explicit DimensionlessProduct(double xi) : xi_(xi) {
    if (!std::isfinite(xi) || xi < 0.0) throw DomainError("xi must be finite and >= 0");
  }

  static DimensionlessProduct from_momentum_interval(double momentum_width, double slit_width) {
    if (!(slit_width > 0.0)) throw DomainError("slit width must be > 0");
    return DimensionlessProduct(momentum_width * slit_width / kPlanck);
  }

  double value() const noexcept { return xi_; }

  /// Momentum interval width dp = xi h / dx.
  double momentum_width(double slit_width) const {
    if (!(slit_width > 0.0)) throw DomainError("slit width must be > 0");
    return xi_ * kPlanck / slit_width;
  }

  friend auto operator<=>(const DimensionlessProduct&, const DimensionlessProduct&) = default;

 private:
  double xi_;
};

}  // namespace slitlab
