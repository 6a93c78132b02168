#pragma once

#include <string>

#include "covnav/bench/trajlog.hpp"
#include "covnav/scene/arena.hpp"

namespace covnav::bench {

// Static trajectory figure: obstacles, start markers (blue), goal markers
// (orange), one colored path per agent.
std::string render_svg(const TrajectoryLog& log, const scene::Arena& arena);

}  // namespace covnav::bench
