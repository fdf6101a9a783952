#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slitlab/errors.hpp"

namespace slitlab {

struct CurveSample {
  double xi = 0.0;
  double p = 0.0;

  friend bool operator==(const CurveSample&, const CurveSample&) = default;
};

/// Sampled map xi -> P(xi). Abscissae strictly increasing; probabilities in
/// [0, 1] and nondecreasing up to `monotone_tol`.
class ProbabilityCurve {
 public:
  ProbabilityCurve(std::vector<CurveSample> samples, std::string label, double monotone_tol = 0.0)
      : samples_(std::move(samples)), label_(std::move(label)) {
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      const auto& s = samples_[i];
      if (!std::isfinite(s.xi) || s.xi < 0.0) throw DomainError("ProbabilityCurve: xi must be finite and >= 0");
      if (!(s.p >= -monotone_tol && s.p <= 1.0 + monotone_tol))
        throw DomainError("ProbabilityCurve: p outside [0, 1] at xi = " + std::to_string(s.xi));
      if (i > 0) {
        if (!(s.xi > samples_[i - 1].xi)) throw DomainError("ProbabilityCurve: xi not strictly increasing");
        if (s.p < samples_[i - 1].p - monotone_tol)
          throw DomainError("ProbabilityCurve: p decreases at xi = " + std::to_string(s.xi));
      }
    }
  }

  const std::vector<CurveSample>& samples() const noexcept { return samples_; }
  const std::string& label() const noexcept { return label_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }

  double xi_min() const { return samples_.empty() ? 0.0 : samples_.front().xi; }
  double xi_max() const { return samples_.empty() ? 0.0 : samples_.back().xi; }

  bool covers(double lo, double hi) const { return !samples_.empty() && xi_min() <= lo && xi_max() >= hi; }

  /// Linear interpolation; throws outside the sampled range.
  double at(double xi) const {
    if (samples_.empty() || xi < xi_min() || xi > xi_max())
      throw DomainError("ProbabilityCurve::at: xi = " + std::to_string(xi) + " outside sampled range");
    auto hi = std::lower_bound(samples_.begin(), samples_.end(), xi,
                               [](const CurveSample& s, double v) { return s.xi < v; });
    if (hi->xi == xi) return hi->p;
    auto lo = std::prev(hi);
    const double t = (xi - lo->xi) / (hi->xi - lo->xi);
    return lo->p + t * (hi->p - lo->p);
  }

 private:
  std::vector<CurveSample> samples_;
  std::string label_;
};

}  // namespace slitlab
