#pragma once

#include <cmath>
#include <numbers>

// Unit conventions: energies and couplings in MHz, fields in Gauss, times in
// seconds. Every conversion between them goes through the constants below.
namespace lacsim::units {

/// Bohr magneton over Planck constant, MHz per Gauss (CODATA 2018).
inline constexpr double kBohrMhzPerGauss = 1.39962449361;

/// Converts MHz * seconds into a dimensionless cycle count.
inline constexpr double kHzPerMhz = 1.0e6;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Angle between two <111> directions, arccos(-1/3).
inline const double kTetrahedralAngle = std::acos(-1.0 / 3.0);

inline constexpr double kDefaultTauSeconds = 1.0e-4;

inline double degrees_to_radians(double deg) { return deg * std::numbers::pi / 180.0; }
inline double radians_to_degrees(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace lacsim::units
