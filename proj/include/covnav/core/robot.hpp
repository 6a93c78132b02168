#pragma once

#include <cmath>

namespace covnav {

// Locobot-profile constants shared across modules.
inline constexpr double kAgentRadius = 0.18;      // body width 0.36 m
inline constexpr double kVMax = 0.70;             // m/s
inline const double kWMax = M_PI;                 // rad/s (180 deg/s)
inline constexpr double kStepSeconds = 1.0;
inline constexpr int kSubsteps = 10;              // 7 cm max travel per substep
inline constexpr int kMaxEpisodeSteps = 80;       // T
inline constexpr double kSuccessRadius = 1.0;     // meters, geodesic
inline constexpr double kMaxSensorRange = 15.0;   // meters
inline constexpr int kDefaultRays = 72;

}  // namespace covnav
