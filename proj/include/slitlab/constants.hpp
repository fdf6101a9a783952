#pragma once

#include <numbers>

namespace slitlab {

/// Planck constant, exact SI value (J s).
inline constexpr double kPlanck = 6.62607015e-34;

inline constexpr double kPi = std::numbers::pi;

}  // namespace slitlab
