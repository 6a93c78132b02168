#include "covnav/scene/geodesic.hpp"

#include <cmath>
#include <queue>
#include <stdexcept>

namespace covnav::scene {

double GeodesicField::at(const Pose& p) const {
  if (!inside(p)) throw std::out_of_range("pose outside arena");
  const int ix = static_cast<int>(std::floor(p.x / cell_size));
  const int iy = static_cast<int>(std::floor(p.y / cell_size));
  return at_cell(ix, iy);
}

double GeodesicField::at_nearest(const Pose& p, int max_ring) const {
  const double direct = at(p);
  if (std::isfinite(direct)) return direct;
  const int cx = static_cast<int>(std::floor(p.x / cell_size));
  const int cy = static_cast<int>(std::floor(p.y / cell_size));
  for (int ring = 1; ring <= max_ring; ++ring) {
    double best = kInf;
    for (int dy = -ring; dy <= ring; ++dy) {
      for (int dx = -ring; dx <= ring; ++dx) {
        if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
        best = std::min(best, at_cell(cx + dx, cy + dy));
      }
    }
    if (std::isfinite(best)) return best;
  }
  return kInf;
}

std::vector<uint8_t> inflate_obstacles(const Arena& arena, double radius) {
  const int nx = arena.nx, ny = arena.ny;
  std::vector<uint8_t> blocked(static_cast<size_t>(nx) * ny, 0);
  // Offsets whose cell square comes within `radius` of a cell center.
  const int reach = static_cast<int>(std::ceil(radius / arena.cell_size)) + 1;
  std::vector<std::pair<int, int>> taps;
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      const double qx = std::max(0.0, (std::abs(dx) - 0.5) * arena.cell_size);
      const double qy = std::max(0.0, (std::abs(dy) - 0.5) * arena.cell_size);
      if (qx * qx + qy * qy < radius * radius) taps.emplace_back(dx, dy);
    }
  }
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      if (!arena.occupancy[static_cast<size_t>(iy) * nx + ix]) continue;
      for (const auto& [dx, dy] : taps) {
        const int mx = ix + dx, my = iy + dy;
        if (mx >= 0 && mx < nx && my >= 0 && my < ny) {
          blocked[static_cast<size_t>(my) * nx + mx] = 1;
        }
      }
    }
  }
  return blocked;
}

GeodesicField compute_geodesic_field(const Arena& arena, const Pose& goal,
                                     double agent_radius) {
  if (agent_radius <= 0.0) throw std::invalid_argument("agent_radius must be > 0");
  if (!arena.contains(goal.x, goal.y)) throw std::invalid_argument("goal outside arena");

  GeodesicField f;
  f.goal = goal;
  f.inflation_radius = agent_radius;
  f.nx = arena.nx;
  f.ny = arena.ny;
  f.cell_size = arena.cell_size;
  f.distances.assign(static_cast<size_t>(f.nx) * f.ny, kInf);

  const std::vector<uint8_t> blocked = inflate_obstacles(arena, agent_radius);
  const int gx = arena.cell_x(goal.x);
  const int gy = arena.cell_y(goal.y);
  const size_t gi = static_cast<size_t>(gy) * f.nx + gx;
  if (blocked[gi]) throw std::runtime_error("goal not navigable");

  const double straight = arena.cell_size;
  const double diagonal = arena.cell_size * std::sqrt(2.0);

  using Item = std::pair<double, size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  f.distances[gi] = 0.0;
  heap.emplace(0.0, gi);
  while (!heap.empty()) {
    const auto [d, i] = heap.top();
    heap.pop();
    if (d > f.distances[i]) continue;
    const int ix = static_cast<int>(i % f.nx);
    const int iy = static_cast<int>(i / f.nx);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const int mx = ix + dx, my = iy + dy;
        if (mx < 0 || mx >= f.nx || my < 0 || my >= f.ny) continue;
        const size_t mi = static_cast<size_t>(my) * f.nx + mx;
        if (blocked[mi]) continue;
        if (dx != 0 && dy != 0) {
          // no corner cutting: both orthogonal neighbors must be free
          if (blocked[static_cast<size_t>(iy) * f.nx + mx] ||
              blocked[static_cast<size_t>(my) * f.nx + ix]) {
            continue;
          }
        }
        const double nd = d + ((dx != 0 && dy != 0) ? diagonal : straight);
        if (nd < f.distances[mi]) {
          f.distances[mi] = nd;
          heap.emplace(nd, mi);
        }
      }
    }
  }
  return f;
}

}  // namespace covnav::scene
