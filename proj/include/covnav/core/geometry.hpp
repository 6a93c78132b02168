#pragma once

#include <cmath>

namespace covnav {

// Normalize an angle into (-pi, pi].
inline double normalize_angle(double a) {
  double r = std::remainder(a, 2.0 * M_PI);
  if (r <= -M_PI) r += 2.0 * M_PI;
  return r;
}

// Planar pose. Heading o is kept in (-pi, pi].
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double o = 0.0;

  Pose() = default;
  Pose(double x_, double y_, double o_) : x(x_), y(y_), o(normalize_angle(o_)) {}

  void set_heading(double a) { o = normalize_angle(a); }

  bool operator==(const Pose& other) const {
    return x == other.x && y == other.y && o == other.o;
  }
};

inline double euclidean(const Pose& a, const Pose& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Normalized differential-drive command, both components in [-1, 1].
struct Action {
  double v = 0.0;
  double w = 0.0;
};

inline double clamp(double x, double lo, double hi) {
  return x < lo ? lo : (x > hi ? hi : x);
}

}  // namespace covnav
