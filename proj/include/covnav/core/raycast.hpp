#pragma once

#include <cstddef>
#include <cstdint>

namespace covnav {

// Minimal occupancy-grid view decoupling the ray marcher from scene types.
struct GridView {
  int nx = 0;
  int ny = 0;
  double cell = 0.1;
  const uint8_t* occ = nullptr;  // row-major [iy * nx + ix]

  bool occupied(int ix, int iy) const {
    if (ix < 0 || ix >= nx || iy < 0 || iy >= ny) return true;
    return occ[static_cast<size_t>(iy) * nx + ix] != 0;
  }
};

// Distance along (dx, dy) from (x, y) to the first obstacle-cell boundary,
// clipped at max_range. (dx, dy) must be unit length.
double raycast_grid(const GridView& g, double x, double y, double dx, double dy,
                    double max_range);

// Distance to the surface of the disc at (cx, cy) with radius r, or a value
// > max_range when the ray misses. (dx, dy) must be unit length.
double ray_disc(double x, double y, double dx, double dy, double cx, double cy,
                double r, double max_range);

}  // namespace covnav
