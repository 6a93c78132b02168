#include "covnav/core/raycast.hpp"

#include <cmath>
#include <limits>

namespace covnav {

double raycast_grid(const GridView& g, double x, double y, double dx, double dy,
                    double max_range) {
  int ix = static_cast<int>(std::floor(x / g.cell));
  int iy = static_cast<int>(std::floor(y / g.cell));
  if (g.occupied(ix, iy)) return 0.0;

  const double inf = std::numeric_limits<double>::infinity();
  const int step_x = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  const int step_y = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
  const double t_delta_x = step_x != 0 ? g.cell / std::abs(dx) : inf;
  const double t_delta_y = step_y != 0 ? g.cell / std::abs(dy) : inf;

  double t_max_x = inf;
  if (step_x > 0) t_max_x = ((ix + 1) * g.cell - x) / dx;
  if (step_x < 0) t_max_x = (ix * g.cell - x) / dx;
  double t_max_y = inf;
  if (step_y > 0) t_max_y = ((iy + 1) * g.cell - y) / dy;
  if (step_y < 0) t_max_y = (iy * g.cell - y) / dy;

  while (true) {
    double t;
    if (t_max_x < t_max_y) {
      t = t_max_x;
      t_max_x += t_delta_x;
      ix += step_x;
    } else {
      t = t_max_y;
      t_max_y += t_delta_y;
      iy += step_y;
    }
    if (t > max_range) return max_range;
    if (g.occupied(ix, iy)) return t;
  }
}

double ray_disc(double x, double y, double dx, double dy, double cx, double cy,
                double r, double max_range) {
  const double miss = max_range * 2.0 + 1.0;
  const double fx = x - cx;
  const double fy = y - cy;
  const double b = fx * dx + fy * dy;           // = -t_closest
  const double c = fx * fx + fy * fy - r * r;
  if (c <= 0.0) return 0.0;                     // origin inside the disc
  const double disc = b * b - c;
  if (disc < 0.0) return miss;
  const double t = -b - std::sqrt(disc);
  if (t < 0.0 || t > max_range) return miss;
  return t;
}

}  // namespace covnav
