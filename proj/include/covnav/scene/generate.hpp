#pragma once

#include "covnav/scene/arena.hpp"

namespace covnav::scene {

// Room-layout parameters for procedural arena generation.
struct ArenaStyle {
  bool internal_walls = true;
  double min_room_m = 2.6;      // smallest room side produced by a split
  double door_m = 0.85;         // doorway width (must stay >= 0.8)
  double split_prob = 1.0;      // chance to split a splittable region
  double clutter_per_m2 = 0.10; // freestanding obstacle density
  double clutter_min_m = 0.9;
  double clutter_max_m = 1.7;
  double clutter_wall_clearance_m = 0.55;

  static ArenaStyle empty_room() {
    ArenaStyle s;
    s.internal_walls = false;
    s.clutter_per_m2 = 0.0;
    return s;
  }
  static ArenaStyle single_room() {
    ArenaStyle s;
    s.internal_walls = false;
    return s;
  }
};

// Deterministic in (seed, width, height, style). Throws std::runtime_error
// after the retry budget if no layout keeps >= 50% of the interior in one
// navigable component.
Arena generate_arena(uint64_t seed, double width, double height,
                     const ArenaStyle& style = ArenaStyle{});

}  // namespace covnav::scene
