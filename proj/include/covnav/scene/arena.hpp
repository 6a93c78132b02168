#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "covnav/core/geometry.hpp"

namespace covnav::scene {

inline constexpr double kCellSize = 0.1;  // 10 cm grid, 100 cm^2 cells

// Static occupancy world. Immutable after construction; safe to share
// across workers by const reference / shared_ptr.
struct Arena {
  std::string id;
  double width = 0.0;   // meters, x extent
  double height = 0.0;  // meters, y extent
  double cell_size = kCellSize;
  int nx = 0;
  int ny = 0;
  std::vector<uint8_t> occupancy;  // row-major [iy * nx + ix], 1 = obstacle
  uint64_t seed = 0;

  bool in_bounds(int ix, int iy) const {
    return ix >= 0 && ix < nx && iy >= 0 && iy < ny;
  }
  bool occupied(int ix, int iy) const {
    return !in_bounds(ix, iy) || occupancy[static_cast<size_t>(iy) * nx + ix] != 0;
  }
  int cell_x(double x) const { return static_cast<int>(std::floor(x / cell_size)); }
  int cell_y(double y) const { return static_cast<int>(std::floor(y / cell_size)); }
  double center_x(int ix) const { return (ix + 0.5) * cell_size; }
  double center_y(int iy) const { return (iy + 0.5) * cell_size; }
  bool contains(double x, double y) const {
    return x >= 0.0 && x < width && y >= 0.0 && y < height;
  }

  // True when the agent disc at (x, y) with the given radius touches an
  // obstacle cell or leaves the arena. Shared predicate for simulation
  // contacts, obstacle inflation and placement checks.
  bool disc_collides(double x, double y, double radius) const;

  // Largest 4-connected free component as a fraction of the interior
  // (non-boundary) cell count.
  double largest_free_component_fraction() const;
  bool boundary_closed() const;

  std::string to_json() const;
  static Arena from_json(const std::string& text);
};

}  // namespace covnav::scene
