#include "covnav/scene/arena.hpp"

#include <json.hpp>

#include <queue>
#include <stdexcept>

#include "covnav/core/base64.hpp"

namespace covnav::scene {

bool Arena::disc_collides(double x, double y, double radius) const {
  if (x < radius || y < radius || x > width - radius || y > height - radius) {
    return true;
  }
  const int ix0 = cell_x(x - radius);
  const int ix1 = cell_x(x + radius);
  const int iy0 = cell_y(y - radius);
  const int iy1 = cell_y(y + radius);
  const double r2 = radius * radius;
  for (int iy = iy0; iy <= iy1; ++iy) {
    for (int ix = ix0; ix <= ix1; ++ix) {
      if (!occupied(ix, iy)) continue;
      // squared distance from (x, y) to the cell's axis-aligned square
      const double cx0 = ix * cell_size, cx1 = cx0 + cell_size;
      const double cy0 = iy * cell_size, cy1 = cy0 + cell_size;
      const double dx = x < cx0 ? cx0 - x : (x > cx1 ? x - cx1 : 0.0);
      const double dy = y < cy0 ? cy0 - y : (y > cy1 ? y - cy1 : 0.0);
      if (dx * dx + dy * dy < r2) return true;
    }
  }
  return false;
}

double Arena::largest_free_component_fraction() const {
  const size_t n = static_cast<size_t>(nx) * ny;
  std::vector<int> comp(n, -1);
  int best = 0;
  long interior = 0;
  for (int iy = 1; iy < ny - 1; ++iy) {
    for (int ix = 1; ix < nx - 1; ++ix) interior++;
  }
  if (interior == 0) return 0.0;
  int next_id = 0;
  for (int sy = 0; sy < ny; ++sy) {
    for (int sx = 0; sx < nx; ++sx) {
      const size_t si = static_cast<size_t>(sy) * nx + sx;
      if (occupancy[si] || comp[si] >= 0) continue;
      int count = 0;
      std::queue<std::pair<int, int>> q;
      q.emplace(sx, sy);
      comp[si] = next_id;
      while (!q.empty()) {
        auto [cx, cy] = q.front();
        q.pop();
        count++;
        constexpr int dx[4] = {1, -1, 0, 0};
        constexpr int dy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int mx = cx + dx[k], my = cy + dy[k];
          if (!in_bounds(mx, my)) continue;
          const size_t mi = static_cast<size_t>(my) * nx + mx;
          if (occupancy[mi] || comp[mi] >= 0) continue;
          comp[mi] = next_id;
          q.emplace(mx, my);
        }
      }
      best = std::max(best, count);
      next_id++;
    }
  }
  return static_cast<double>(best) / static_cast<double>(interior);
}

bool Arena::boundary_closed() const {
  for (int ix = 0; ix < nx; ++ix) {
    if (!occupied(ix, 0) || !occupied(ix, ny - 1)) return false;
  }
  for (int iy = 0; iy < ny; ++iy) {
    if (!occupied(0, iy) || !occupied(nx - 1, iy)) return false;
  }
  return true;
}

std::string Arena::to_json() const {
  nlohmann::json j;
  j["id"] = id;
  j["width"] = width;
  j["height"] = height;
  j["cell_size"] = cell_size;
  j["nx"] = nx;
  j["ny"] = ny;
  j["seed"] = seed;
  j["occupancy"] = base64_encode(pack_bits(occupancy));
  return j.dump();
}

Arena Arena::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  Arena a;
  a.id = j.at("id").get<std::string>();
  a.width = j.at("width").get<double>();
  a.height = j.at("height").get<double>();
  a.cell_size = j.at("cell_size").get<double>();
  a.nx = j.at("nx").get<int>();
  a.ny = j.at("ny").get<int>();
  a.seed = j.at("seed").get<uint64_t>();
  const size_t n = static_cast<size_t>(a.nx) * a.ny;
  a.occupancy = unpack_bits(base64_decode(j.at("occupancy").get<std::string>()), n);
  if (a.occupancy.size() != n) throw std::runtime_error("arena occupancy size mismatch");
  return a;
}

}  // namespace covnav::scene
