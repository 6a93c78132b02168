#include "covnav/scene/generate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "covnav/core/rng.hpp"

namespace covnav::scene {

namespace {

struct Region {
  int x0, y0, x1, y1;  // half-open cell ranges
  int w() const { return x1 - x0; }
  int h() const { return y1 - y0; }
};

void fill_rect(Arena& a, int x0, int y0, int x1, int y1) {
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  x1 = std::min(x1, a.nx);
  y1 = std::min(y1, a.ny);
  for (int iy = y0; iy < y1; ++iy) {
    for (int ix = x0; ix < x1; ++ix) {
      a.occupancy[static_cast<size_t>(iy) * a.nx + ix] = 1;
    }
  }
}

void partition(Arena& a, Rng& rng, const ArenaStyle& style, const Region& r,
               std::vector<Region>& rooms) {
  const int min_room = std::max(2, static_cast<int>(std::round(style.min_room_m / a.cell_size)));
  const int door = std::max(8, static_cast<int>(std::round(style.door_m / a.cell_size)));
  const bool can_split_x = r.w() >= 2 * min_room + 1;
  const bool can_split_y = r.h() >= 2 * min_room + 1;
  if ((!can_split_x && !can_split_y) || rng.uniform() > style.split_prob) {
    rooms.push_back(r);
    return;
  }
  bool split_x = can_split_x && (!can_split_y || r.w() >= r.h());
  if (can_split_x && can_split_y && r.w() == r.h()) split_x = rng.uniform() < 0.5;

  if (split_x) {
    const int wx = r.x0 + min_room + static_cast<int>(rng.uniform_int(r.w() - 2 * min_room));
    fill_rect(a, wx, r.y0, wx + 1, r.y1);
    const int dspan = std::max(1, r.h() - door);
    const int dy = r.y0 + static_cast<int>(rng.uniform_int(dspan));
    for (int iy = dy; iy < std::min(dy + door, r.y1); ++iy) {
      a.occupancy[static_cast<size_t>(iy) * a.nx + wx] = 0;
    }
    partition(a, rng, style, {r.x0, r.y0, wx, r.y1}, rooms);
    partition(a, rng, style, {wx + 1, r.y0, r.x1, r.y1}, rooms);
  } else {
    const int wy = r.y0 + min_room + static_cast<int>(rng.uniform_int(r.h() - 2 * min_room));
    fill_rect(a, r.x0, wy, r.x1, wy + 1);
    const int dspan = std::max(1, r.w() - door);
    const int dx = r.x0 + static_cast<int>(rng.uniform_int(dspan));
    for (int ix = dx; ix < std::min(dx + door, r.x1); ++ix) {
      a.occupancy[static_cast<size_t>(wy) * a.nx + ix] = 0;
    }
    partition(a, rng, style, {r.x0, r.y0, r.x1, wy}, rooms);
    partition(a, rng, style, {r.x0, wy + 1, r.x1, r.y1}, rooms);
  }
}

void add_clutter(Arena& a, Rng& rng, const ArenaStyle& style,
                 const std::vector<Region>& rooms) {
  if (style.clutter_per_m2 <= 0.0) return;
  const double cell = a.cell_size;
  for (const Region& room : rooms) {
    const double area = room.w() * room.h() * cell * cell;
    const int count = static_cast<int>(std::floor(area * style.clutter_per_m2 + rng.uniform()));
    const int clear = static_cast<int>(std::round(style.clutter_wall_clearance_m / cell));
    for (int c = 0; c < count; ++c) {
      const int bw = static_cast<int>(std::round(
          rng.uniform(style.clutter_min_m, style.clutter_max_m) / cell));
      const int bh = static_cast<int>(std::round(
          rng.uniform(style.clutter_min_m, style.clutter_max_m) / cell));
      const int lo_x = room.x0 + clear;
      const int hi_x = room.x1 - clear - bw;
      const int lo_y = room.y0 + clear;
      const int hi_y = room.y1 - clear - bh;
      if (hi_x <= lo_x || hi_y <= lo_y) continue;
      const int bx = lo_x + static_cast<int>(rng.uniform_int(hi_x - lo_x));
      const int by = lo_y + static_cast<int>(rng.uniform_int(hi_y - lo_y));
      fill_rect(a, bx, by, bx + bw, by + bh);
    }
  }
}

Arena build_once(uint64_t seed, double width, double height, const ArenaStyle& style) {
  Arena a;
  a.seed = seed;
  a.width = width;
  a.height = height;
  a.cell_size = kCellSize;
  a.nx = static_cast<int>(std::round(width / a.cell_size));
  a.ny = static_cast<int>(std::round(height / a.cell_size));
  a.occupancy.assign(static_cast<size_t>(a.nx) * a.ny, 0);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "arena-%016llx", static_cast<unsigned long long>(seed));
  a.id = buf;

  fill_rect(a, 0, 0, a.nx, 1);
  fill_rect(a, 0, a.ny - 1, a.nx, a.ny);
  fill_rect(a, 0, 0, 1, a.ny);
  fill_rect(a, a.nx - 1, 0, a.nx, a.ny);

  Rng rng(Rng::derive(seed, 0xA2E7A));
  std::vector<Region> rooms;
  const Region interior{1, 1, a.nx - 1, a.ny - 1};
  if (style.internal_walls) {
    partition(a, rng, style, interior, rooms);
  } else {
    rooms.push_back(interior);
  }
  add_clutter(a, rng, style, rooms);
  return a;
}

}  // namespace

Arena generate_arena(uint64_t seed, double width, double height, const ArenaStyle& style) {
  if (width < 10.0 || width > 30.0 || height < 10.0 || height > 30.0) {
    throw std::invalid_argument("arena dimensions must lie in [10, 30] m");
  }
  if (style.door_m < 0.8) throw std::invalid_argument("doorways must be >= 0.8 m");
  constexpr int kMaxAttempts = 32;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Arena a = build_once(Rng::derive(seed, static_cast<uint64_t>(attempt)),
                         width, height, style);
    a.seed = seed;  // report the caller's seed, not the attempt stream
    char buf[32];
    std::snprintf(buf, sizeof(buf), "arena-%016llx", static_cast<unsigned long long>(seed));
    a.id = buf;
    if (a.largest_free_component_fraction() >= 0.5) return a;
  }
  throw std::runtime_error("arena generation failed: no layout with a large enough navigable component");
}

}  // namespace covnav::scene
