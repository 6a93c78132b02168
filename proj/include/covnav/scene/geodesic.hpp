#pragma once

#include <limits>
#include <memory>
#include <vector>

#include "covnav/scene/arena.hpp"

namespace covnav::scene {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest traversable path length (meters) from every cell to the goal,
// computed by Dijkstra on the 8-connected grid after inflating obstacles
// by the agent radius. Immutable after construction.
struct GeodesicField {
  Pose goal;
  double inflation_radius = 0.0;
  int nx = 0;
  int ny = 0;
  double cell_size = kCellSize;
  std::vector<double> distances;  // row-major, kInf where unreachable

  double at_cell(int ix, int iy) const {
    if (ix < 0 || ix >= nx || iy < 0 || iy >= ny) return kInf;
    return distances[static_cast<size_t>(iy) * nx + ix];
  }
  // Distance at the cell containing the pose. Throws if outside the arena.
  double at(const Pose& p) const;
  // Like at(), but when the pose's cell is blocked by inflation (the disc
  // can straddle such cells legally) falls back to the nearest navigable
  // cell within a small ring search.
  double at_nearest(const Pose& p, int max_ring = 6) const;
  bool inside(const Pose& p) const {
    return p.x >= 0.0 && p.y >= 0.0 && p.x < nx * cell_size && p.y < ny * cell_size;
  }
};

GeodesicField compute_geodesic_field(const Arena& arena, const Pose& goal,
                                     double agent_radius);

// Cells blocked after inflating obstacles by `radius` (disc-vs-cell-square
// test, matching Arena::disc_collides).
std::vector<uint8_t> inflate_obstacles(const Arena& arena, double radius);

}  // namespace covnav::scene
